#pragma once

#include <string>
#include <vector>

#include "c2p/autodiff.hpp"
#include "c2p/renderer.hpp"

namespace c2p {

// Depth-map encoder: average-pooled inverted depth grid through a small MLP,
// L2-normalized output. The trainable depth tower and the frozen proxy tower
// share this architecture; freezing is purely a question of which entries
// the optimizer updates and whether the tape records gradients.
struct EncoderSpec {
  int patch_grid = 14;  // pooled cells per side; 224/14 -> 16x16 windows
  int hidden = 256;
  int out_dim = 64;     // embedding size C
  int layers = 2;       // hidden layers before the head
};

void validate(const EncoderSpec& spec);

inline constexpr const char* kDepthPrefix = "depth.";
inline constexpr const char* kProxyPrefix = "proxy.";

// Fixed seed for the frozen proxy tower so it is the same target in every
// experiment regardless of the training seed.
inline constexpr std::uint64_t kProxyInitSeed = 0x9e3779b9;

// Occupied depths inverted to d' = (z_max - z) / (z_max - z_min + 1e-8)
// (near surfaces come out large), empty cells 0, then average-pooled to the
// patch grid and flattened. Throws ShapeError when the map's side is not a
// multiple of the grid.
Tensor pooled_depth_input(const DepthMap& map, const EncoderSpec& spec);

// Creates <prefix>w1/b1, ... entries in the store.
void init_encoder_params(ParamStore& store, const std::string& prefix,
                         const EncoderSpec& spec, Rng& rng);

// Weight nodes for one tower on one tape; build once, encode many inputs.
struct EncoderWeights {
  std::vector<std::pair<Var, Var>> hidden;  // (w, b) per hidden layer
  Var head_w, head_b;
};

EncoderWeights make_encoder_weights(Tape& tape, const ParamStore& store,
                                    const std::string& prefix,
                                    const EncoderSpec& spec, bool trainable);

Var encode_from_input(Tape& tape, Var input, const EncoderWeights& weights);

// Convenience: builds the weight nodes per call.
Var encode_from_input(Tape& tape, Var input, const ParamStore& store,
                      const std::string& prefix, const EncoderSpec& spec,
                      bool trainable);

// Full encode on a tape. trainable=true reads weights through tape.param so
// backward() accumulates into the store; trainable=false embeds them as
// constants, so gradients are never accumulated for that tower.
Var encode_depth(Tape& tape, const DepthMap& map, const ParamStore& store,
                 const std::string& prefix, const EncoderSpec& spec,
                 bool trainable);

// Forward-only convenience; returns the unit-norm feature vector.
Tensor encode_infer(const DepthMap& map, const ParamStore& store,
                    const std::string& prefix, const EncoderSpec& spec);

// Proxy tower shorthand (frozen weights under kProxyPrefix).
Tensor encode_image_proxy(const DepthMap& dense_map, const ParamStore& store,
                          const EncoderSpec& spec);

// Per-class unit anchors standing in for a textual tower: L2-normalized
// class means of proxy features over dense renders of the training samples.
struct AnchorBank {
  std::vector<Tensor> anchors;          // one unit vector per class
  std::vector<std::string> class_names;

  std::size_t num_classes() const { return anchors.size(); }
};

void validate(const AnchorBank& bank);  // K >= 2, anchors unit-norm

struct LabeledCloud {
  const PointCloud* cloud;
  int label;
};

// Dense renders (weighted rule) of every training sample in every view, all
// encoded with the frozen proxy tower, averaged per class, normalized.
AnchorBank build_anchor_bank(const std::vector<LabeledCloud>& train_samples,
                             int num_classes,
                             const std::vector<std::string>& class_names,
                             const ParamStore& frozen, const EncoderSpec& spec,
                             const ViewSet& views,
                             const RenderConfig& dense_cfg, int threads = 1);

// Anchors persist inside checkpoints as entries named
// "anchor.<index>.<class name>".
void anchors_to_store(const AnchorBank& bank, ParamStore& store);
AnchorBank anchors_from_store(const ParamStore& store);
bool store_has_anchors(const ParamStore& store);

}  // namespace c2p
