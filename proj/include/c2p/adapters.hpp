#pragma once

#include <string>
#include <vector>

#include "c2p/encoders.hpp"

namespace c2p {

// Mean multi-view cosine against each class anchor. logits[k] =
// (1/N) sum_v cos(F_v, anchor_k). Throws InvalidInput on an empty bank or
// view list.
std::vector<double> zero_shot_logits(const std::vector<Tensor>& view_feats,
                                     const AnchorBank& anchors);

std::size_t argmax(const std::vector<double>& v);

// --- learnable heads --------------------------------------------------
// All heads store their weights in a ParamStore under a prefix and build
// their forward pass on a tape, so the same code serves training and
// evaluation.

// Global-view aggregator: two linear layers with ReLU between, mapping the
// concatenation of N view features to one (unnormalized) global feature.
// Hidden width equals the feature dim.
void init_aggregator_params(ParamStore& store, const std::string& prefix,
                            int num_views, int dim, Rng& rng);

Var global_aggregate(Tape& tape, const std::vector<Var>& view_feats,
                     const ParamStore& store, const std::string& prefix,
                     bool trainable);

inline constexpr double kGateInit = 0.5;

// Gated dual path: separate aggregators for the depth tower and the frozen
// proxy tower, fused as sigma_gate * G_proxy + G_depth, classified by
// cosine against the anchors. Parameter names: <prefix>depth.*,
// <prefix>proxy.*, <prefix>gate.
void init_dual_path_params(ParamStore& store, const std::string& prefix,
                           int num_views, int dim, Rng& rng);

Var gated_dual_path_logits(Tape& tape, const std::vector<Var>& depth_feats,
                           const std::vector<Var>& proxy_feats,
                           const ParamStore& store, const std::string& prefix,
                           bool trainable, const AnchorBank& anchors);

// Single-path collapse of the same head: cosine logits of one aggregated
// depth feature. Parameter names: <prefix>depth.*.
void init_single_path_params(ParamStore& store, const std::string& prefix,
                             int num_views, int dim, Rng& rng);

Var single_path_logits(Tape& tape, const std::vector<Var>& depth_feats,
                       const ParamStore& store, const std::string& prefix,
                       bool trainable, const AnchorBank& anchors);

// Inter-view residual baseline: global feature from the aggregator, per-view
// transforms W_v, logits as the alpha-weighted sum of per-view cosines of
// (F_v + ReLU(G W_v^T)). alpha is supplied (uniform 1/N unless stated);
// weight search is deliberately unsupported. Parameter names:
// <prefix>agg.*, <prefix>view<NN>.w.
void init_inter_view_params(ParamStore& store, const std::string& prefix,
                            int num_views, int dim, Rng& rng);

Var inter_view_logits(Tape& tape, const std::vector<Var>& view_feats,
                      const ParamStore& store, const std::string& prefix,
                      bool trainable, const AnchorBank& anchors,
                      const std::vector<double>& alpha);

std::vector<double> uniform_alpha(std::size_t num_views);

}  // namespace c2p
