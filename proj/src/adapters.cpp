#include "c2p/adapters.hpp"

#include <cmath>
#include <cstdio>

namespace c2p {

namespace {

double plain_cosine(const Tensor& a, const Tensor& b) {
  if (!a.same_shape(b)) throw ShapeError("cosine shape mismatch");
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  if (aa == 0.0 || bb == 0.0) throw NumericsError("cosine of zero vector");
  return ab / (std::sqrt(aa) * std::sqrt(bb));
}

Var weight_var(Tape& tape, const ParamStore& store, const std::string& name,
               bool trainable) {
  if (trainable) return tape.param(name);
  return tape.constant(store.tensor(name));
}

Var anchor_cosines(Tape& tape, Var global, const AnchorBank& anchors) {
  std::vector<Var> logits;
  logits.reserve(anchors.num_classes());
  for (const Tensor& a : anchors.anchors) {
    logits.push_back(cosine(global, tape.constant(a)));
  }
  return concat_scalars(tape, logits);
}

}  // namespace

std::vector<double> zero_shot_logits(const std::vector<Tensor>& view_feats,
                                     const AnchorBank& anchors) {
  if (anchors.num_classes() == 0) throw InvalidInput("empty anchor bank");
  if (view_feats.empty()) throw InvalidInput("zero_shot_logits needs >= 1 view");
  std::vector<double> logits(anchors.num_classes(), 0.0);
  double inv = 1.0 / static_cast<double>(view_feats.size());
  for (std::size_t k = 0; k < anchors.num_classes(); ++k) {
    double acc = 0.0;
    for (const Tensor& f : view_feats) {
      acc += plain_cosine(f, anchors.anchors[k]);
    }
    logits[k] = acc * inv;
  }
  return logits;
}

std::size_t argmax(const std::vector<double>& v) {
  if (v.empty()) throw InvalidInput("argmax of empty vector");
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

void init_aggregator_params(ParamStore& store, const std::string& prefix,
                            int num_views, int dim, Rng& rng) {
  if (num_views < 1 || dim < 1) throw InvalidInput("bad aggregator shape");
  std::size_t in = static_cast<std::size_t>(num_views) * dim;
  std::size_t c = static_cast<std::size_t>(dim);
  auto fill = [&rng](Tensor& t, double bound) {
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(-bound, bound);
  };
  Tensor w1({in, c}), b1({c}), w2({c, c}), b2({c});
  fill(w1, std::sqrt(6.0 / static_cast<double>(in)));
  fill(b1, 1.0 / std::sqrt(static_cast<double>(in)));
  fill(w2, std::sqrt(6.0 / static_cast<double>(c)));
  fill(b2, 1.0 / std::sqrt(static_cast<double>(c)));
  store.add(prefix + "f1.w", w1);
  store.add(prefix + "f1.b", b1);
  store.add(prefix + "f2.w", w2);
  store.add(prefix + "f2.b", b2);
}

Var global_aggregate(Tape& tape, const std::vector<Var>& view_feats,
                     const ParamStore& store, const std::string& prefix,
                     bool trainable) {
  if (view_feats.empty()) throw InvalidInput("aggregator needs >= 1 view");
  Var cat = concat(view_feats);
  Var h = relu(linear(cat, weight_var(tape, store, prefix + "f1.w", trainable),
                      weight_var(tape, store, prefix + "f1.b", trainable)));
  return linear(h, weight_var(tape, store, prefix + "f2.w", trainable),
                weight_var(tape, store, prefix + "f2.b", trainable));
}

void init_dual_path_params(ParamStore& store, const std::string& prefix,
                           int num_views, int dim, Rng& rng) {
  init_aggregator_params(store, prefix + "depth.", num_views, dim, rng);
  init_aggregator_params(store, prefix + "proxy.", num_views, dim, rng);
  store.add(prefix + "gate", Tensor::scalar(kGateInit));
}

Var gated_dual_path_logits(Tape& tape, const std::vector<Var>& depth_feats,
                           const std::vector<Var>& proxy_feats,
                           const ParamStore& store, const std::string& prefix,
                           bool trainable, const AnchorBank& anchors) {
  if (depth_feats.size() != proxy_feats.size()) {
    throw ShapeError("dual-path view counts differ");
  }
  Var g_depth = global_aggregate(tape, depth_feats, store, prefix + "depth.",
                                 trainable);
  Var g_proxy = global_aggregate(tape, proxy_feats, store, prefix + "proxy.",
                                 trainable);
  Var gate = weight_var(tape, store, prefix + "gate", trainable);
  Var fused = add(mul_scalar(g_proxy, gate), g_depth);
  return anchor_cosines(tape, fused, anchors);
}

void init_single_path_params(ParamStore& store, const std::string& prefix,
                             int num_views, int dim, Rng& rng) {
  init_aggregator_params(store, prefix + "depth.", num_views, dim, rng);
}

Var single_path_logits(Tape& tape, const std::vector<Var>& depth_feats,
                       const ParamStore& store, const std::string& prefix,
                       bool trainable, const AnchorBank& anchors) {
  Var g = global_aggregate(tape, depth_feats, store, prefix + "depth.",
                           trainable);
  return anchor_cosines(tape, g, anchors);
}

void init_inter_view_params(ParamStore& store, const std::string& prefix,
                            int num_views, int dim, Rng& rng) {
  init_aggregator_params(store, prefix + "agg.", num_views, dim, rng);
  std::size_t c = static_cast<std::size_t>(dim);
  double bound = std::sqrt(6.0 / static_cast<double>(c));
  for (int v = 0; v < num_views; ++v) {
    Tensor w({c, c});
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = rng.uniform(-bound, bound);
    char idx[16];
    std::snprintf(idx, sizeof idx, "%02d", v);
    store.add(prefix + "view" + idx + ".w", w);
  }
}

Var inter_view_logits(Tape& tape, const std::vector<Var>& view_feats,
                      const ParamStore& store, const std::string& prefix,
                      bool trainable, const AnchorBank& anchors,
                      const std::vector<double>& alpha) {
  if (view_feats.empty()) throw InvalidInput("inter-view head needs views");
  if (alpha.size() != view_feats.size()) {
    throw ShapeError("alpha count does not match views");
  }
  Var g = global_aggregate(tape, view_feats, store, prefix + "agg.", trainable);
  std::vector<Var> adapted;
  adapted.reserve(view_feats.size());
  for (std::size_t v = 0; v < view_feats.size(); ++v) {
    char idx[16];
    std::snprintf(idx, sizeof idx, "%02zu", v);
    // G W_v^T: with W_v stored as [C x C], multiply by the transpose via
    // matmul(g, transpose) == row-vector times W_v^T.
    Var w = weight_var(tape, store, prefix + "view" + idx + ".w", trainable);
    adapted.push_back(add(view_feats[v], relu(matmul_transposed(g, w))));
  }
  std::vector<Var> logits;
  for (std::size_t k = 0; k < anchors.num_classes(); ++k) {
    Var anchor = tape.constant(anchors.anchors[k]);
    Var acc = tape.constant(Tensor::scalar(0.0));
    for (std::size_t v = 0; v < view_feats.size(); ++v) {
      acc = add(acc, scale(cosine(adapted[v], anchor), alpha[v]));
    }
    logits.push_back(acc);
  }
  return concat_scalars(tape, logits);
}

std::vector<double> uniform_alpha(std::size_t num_views) {
  if (num_views == 0) throw InvalidInput("no views");
  return std::vector<double>(num_views, 1.0 / static_cast<double>(num_views));
}

}  // namespace c2p
