#include "c2p/encoders.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace c2p {

namespace {

struct LayerName {
  std::string w, b;
};

LayerName layer_name(const std::string& prefix, int i) {
  return {prefix + "w" + std::to_string(i), prefix + "b" + std::to_string(i)};
}

Tensor kaiming_uniform(std::vector<std::size_t> shape, std::size_t fan_in,
                       Rng& rng) {
  double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
  Tensor t(std::move(shape));
  for (std::size_t i = 0; i < t.size(); ++i) {
    t[i] = rng.uniform(-bound, bound);
  }
  return t;
}

Tensor bias_uniform(std::size_t n, std::size_t fan_in, Rng& rng) {
  double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  Tensor t({n});
  for (std::size_t i = 0; i < n; ++i) t[i] = rng.uniform(-bound, bound);
  return t;
}

Var weight_var(Tape& tape, const ParamStore& store, const std::string& name,
               bool trainable) {
  if (trainable) return tape.param(name);
  return tape.constant(store.tensor(name));
}

}  // namespace

void validate(const EncoderSpec& spec) {
  if (spec.out_dim < 2) throw InvalidInput("encoder out_dim must be >= 2");
  if (spec.patch_grid < 1) throw InvalidInput("patch_grid must be >= 1");
  if (spec.hidden < 1) throw InvalidInput("hidden width must be >= 1");
  if (spec.layers < 1) throw InvalidInput("layer count must be >= 1");
}

Tensor pooled_depth_input(const DepthMap& map, const EncoderSpec& spec) {
  validate(spec);
  if (map.width != map.height || map.width % spec.patch_grid != 0) {
    throw ShapeError("depth map " + std::to_string(map.width) + "x" +
                     std::to_string(map.height) +
                     " does not pool to a " + std::to_string(spec.patch_grid) +
                     "-cell grid");
  }
  // Inverted normalization over the occupied pixels of this map.
  double zmin = std::numeric_limits<double>::infinity();
  double zmax = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < map.depth.size(); ++i) {
    if (!map.occupied[i]) continue;
    zmin = std::min(zmin, map.depth[i]);
    zmax = std::max(zmax, map.depth[i]);
  }
  if (zmin > zmax) zmin = zmax = 0.0;  // all-empty map
  double range = zmax - zmin + 1e-8;

  const int grid = spec.patch_grid;
  const int win = map.width / grid;
  const double inv_area = 1.0 / (static_cast<double>(win) * win);
  Tensor out({static_cast<std::size_t>(grid) * grid});
  for (int gy = 0; gy < grid; ++gy) {
    for (int gx = 0; gx < grid; ++gx) {
      double acc = 0.0;
      for (int dy = 0; dy < win; ++dy) {
        for (int dx = 0; dx < win; ++dx) {
          std::size_t idx = map.index(gx * win + dx, gy * win + dy);
          if (map.occupied[idx]) acc += (zmax - map.depth[idx]) / range;
        }
      }
      out[static_cast<std::size_t>(gy) * grid + gx] = acc * inv_area;
    }
  }
  return out;
}

void init_encoder_params(ParamStore& store, const std::string& prefix,
                         const EncoderSpec& spec, Rng& rng) {
  validate(spec);
  std::size_t in = static_cast<std::size_t>(spec.patch_grid) * spec.patch_grid;
  std::size_t hidden = static_cast<std::size_t>(spec.hidden);
  for (int i = 0; i < spec.layers; ++i) {
    auto names = layer_name(prefix, i + 1);
    std::size_t fan_in = i == 0 ? in : hidden;
    store.add(names.w, kaiming_uniform({fan_in, hidden}, fan_in, rng));
    store.add(names.b, bias_uniform(hidden, fan_in, rng));
  }
  auto head = layer_name(prefix, spec.layers + 1);
  std::size_t c = static_cast<std::size_t>(spec.out_dim);
  store.add(head.w, kaiming_uniform({hidden, c}, hidden, rng));
  store.add(head.b, bias_uniform(c, hidden, rng));
}

EncoderWeights make_encoder_weights(Tape& tape, const ParamStore& store,
                                    const std::string& prefix,
                                    const EncoderSpec& spec, bool trainable) {
  EncoderWeights out;
  for (int i = 0; i < spec.layers; ++i) {
    auto names = layer_name(prefix, i + 1);
    out.hidden.emplace_back(weight_var(tape, store, names.w, trainable),
                            weight_var(tape, store, names.b, trainable));
  }
  auto head = layer_name(prefix, spec.layers + 1);
  out.head_w = weight_var(tape, store, head.w, trainable);
  out.head_b = weight_var(tape, store, head.b, trainable);
  return out;
}

Var encode_from_input(Tape& tape, Var input, const EncoderWeights& weights) {
  (void)tape;
  Var h = input;
  for (const auto& [w, b] : weights.hidden) {
    h = relu(linear(h, w, b));
  }
  return l2_normalize(linear(h, weights.head_w, weights.head_b));
}

Var encode_from_input(Tape& tape, Var input, const ParamStore& store,
                      const std::string& prefix, const EncoderSpec& spec,
                      bool trainable) {
  return encode_from_input(
      tape, input, make_encoder_weights(tape, store, prefix, spec, trainable));
}

Var encode_depth(Tape& tape, const DepthMap& map, const ParamStore& store,
                 const std::string& prefix, const EncoderSpec& spec,
                 bool trainable) {
  Var input = tape.constant(pooled_depth_input(map, spec));
  return encode_from_input(tape, input, store, prefix, spec, trainable);
}

Tensor encode_infer(const DepthMap& map, const ParamStore& store,
                    const std::string& prefix, const EncoderSpec& spec) {
  Tape tape;
  Var out = encode_depth(tape, map, store, prefix, spec, /*trainable=*/false);
  return tape.value(out);
}

Tensor encode_image_proxy(const DepthMap& dense_map, const ParamStore& store,
                          const EncoderSpec& spec) {
  return encode_infer(dense_map, store, kProxyPrefix, spec);
}

void validate(const AnchorBank& bank) {
  if (bank.anchors.size() < 2) throw InvalidInput("anchor bank needs K >= 2");
  if (bank.class_names.size() != bank.anchors.size()) {
    throw InvalidInput("anchor bank class-name count mismatch");
  }
  for (const Tensor& a : bank.anchors) {
    double n2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) n2 += a[i] * a[i];
    if (std::abs(std::sqrt(n2) - 1.0) > 1e-9) {
      throw InvalidInput("anchor is not unit-norm");
    }
  }
}

AnchorBank build_anchor_bank(const std::vector<LabeledCloud>& train_samples,
                             int num_classes,
                             const std::vector<std::string>& class_names,
                             const ParamStore& frozen, const EncoderSpec& spec,
                             const ViewSet& views,
                             const RenderConfig& dense_cfg, int threads) {
  if (num_classes < 2) throw InvalidInput("anchor bank needs K >= 2");
  std::size_t c = static_cast<std::size_t>(spec.out_dim);
  std::vector<Tensor> sums(num_classes, Tensor({c}));
  std::vector<std::size_t> counts(num_classes, 0);

  // Per-sample mean features computed in parallel, reduced in index order.
  std::vector<Tensor> per_sample(train_samples.size());
  parallel_for(train_samples.size(), threads, [&](std::size_t i) {
    Tape tape;
    EncoderWeights weights =
        make_encoder_weights(tape, frozen, kProxyPrefix, spec, false);
    Tensor acc({c});
    for (const CameraView& view : views.views) {
      DepthMap dense = render(*train_samples[i].cloud, view, dense_cfg);
      Var f = encode_from_input(
          tape, tape.constant(pooled_depth_input(dense, spec)), weights);
      const Tensor& fv = tape.value(f);
      for (std::size_t j = 0; j < c; ++j) acc[j] += fv[j];
    }
    per_sample[i] = std::move(acc);
  });
  for (std::size_t i = 0; i < train_samples.size(); ++i) {
    int label = train_samples[i].label;
    if (label < 0 || label >= num_classes) {
      throw InvalidInput("sample label out of range");
    }
    for (std::size_t j = 0; j < c; ++j) sums[label][j] += per_sample[i][j];
    counts[label] += views.views.size();
  }

  AnchorBank bank;
  bank.class_names = class_names;
  for (int k = 0; k < num_classes; ++k) {
    if (counts[k] == 0) {
      throw InvalidInput("class " + std::to_string(k) +
                         " has no training samples");
    }
    double norm = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
      sums[k][j] /= static_cast<double>(counts[k]);
      norm += sums[k][j] * sums[k][j];
    }
    norm = std::sqrt(norm);
    if (norm == 0.0) throw NumericsError("degenerate class anchor");
    for (std::size_t j = 0; j < c; ++j) sums[k][j] /= norm;
    bank.anchors.push_back(std::move(sums[k]));
  }
  return bank;
}

void anchors_to_store(const AnchorBank& bank, ParamStore& store) {
  for (std::size_t k = 0; k < bank.anchors.size(); ++k) {
    char idx[16];
    std::snprintf(idx, sizeof idx, "%03zu", k);
    store.add("anchor." + std::string(idx) + "." + bank.class_names[k],
              bank.anchors[k]);
  }
}

AnchorBank anchors_from_store(const ParamStore& store) {
  AnchorBank bank;
  for (const ParamEntry& e : store.entries()) {
    if (e.name.rfind("anchor.", 0) != 0) continue;
    std::string rest = e.name.substr(7);
    auto dotpos = rest.find('.');
    if (dotpos == std::string::npos) {
      throw FormatError("malformed anchor entry name: " + e.name);
    }
    bank.class_names.push_back(rest.substr(dotpos + 1));
    bank.anchors.push_back(Tensor(e.shape, e.values));
  }
  if (bank.anchors.empty()) {
    throw InvalidInput("store contains no anchors");
  }
  return bank;
}

bool store_has_anchors(const ParamStore& store) {
  for (const ParamEntry& e : store.entries()) {
    if (e.name.rfind("anchor.", 0) == 0) return true;
  }
  return false;
}

}  // namespace c2p
