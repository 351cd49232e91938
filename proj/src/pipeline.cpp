#include "c2p/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

namespace c2p {

// --- toy shapes ----------------------------------------------------------

namespace {

const char* const kClassNames[8] = {"sphere",  "cube",   "cylinder", "cone",
                                    "torus",   "wing",   "bracket",  "capsule"};

Vec3 unit_sphere_point(Rng& rng) {
  // Normalized gaussian triple; rejection on the tiny degenerate ball.
  while (true) {
    Vec3 p{rng.normal(), rng.normal(), rng.normal()};
    double n = p.norm();
    if (n > 1e-6) return p * (1.0 / n);
  }
}

// Uniform point on the surface of an axis-aligned box with given half-extents.
Vec3 box_surface_point(Rng& rng, const Vec3& half) {
  double area_x = half.y * half.z;  // relative weights, one per axis pair
  double area_y = half.x * half.z;
  double area_z = half.x * half.y;
  double u = rng.uniform(0.0, 2.0 * (area_x + area_y + area_z));
  double a = rng.uniform(-1.0, 1.0);
  double b = rng.uniform(-1.0, 1.0);
  if (u < 2.0 * area_x) {
    double sign = u < area_x ? 1.0 : -1.0;
    return {sign * half.x, a * half.y, b * half.z};
  }
  u -= 2.0 * area_x;
  if (u < 2.0 * area_y) {
    double sign = u < area_y ? 1.0 : -1.0;
    return {a * half.x, sign * half.y, b * half.z};
  }
  u -= 2.0 * area_y;
  double sign = u < area_z ? 1.0 : -1.0;
  return {a * half.x, b * half.y, sign * half.z};
}

Vec3 sphere_sample(Rng& rng) { return unit_sphere_point(rng); }

Vec3 cube_sample(Rng& rng) {
  return box_surface_point(rng, {0.8, 0.8, 0.8});
}

Vec3 cylinder_sample(Rng& rng) {
  const double r = 0.55, h = 0.9;
  double lateral = 2.0 * M_PI * r * 2.0 * h;
  double caps = 2.0 * M_PI * r * r;
  double u = rng.uniform(0.0, lateral + caps);
  double theta = rng.uniform(0.0, 2.0 * M_PI);
  if (u < lateral) {
    double y = rng.uniform(-h, h);
    return {r * std::cos(theta), y, r * std::sin(theta)};
  }
  double rad = r * std::sqrt(rng.uniform());
  double y = u - lateral < caps * 0.5 ? h : -h;
  return {rad * std::cos(theta), y, rad * std::sin(theta)};
}

Vec3 cone_sample(Rng& rng) {
  const double r = 0.8, h = 1.6, apex_y = 0.8;
  double slant = std::sqrt(r * r + h * h);
  double lateral = M_PI * r * slant;
  double base = M_PI * r * r;
  double u = rng.uniform(0.0, lateral + base);
  double theta = rng.uniform(0.0, 2.0 * M_PI);
  if (u < lateral) {
    double t = std::sqrt(rng.uniform());  // area grows with radius
    return {t * r * std::cos(theta), apex_y - t * h, t * r * std::sin(theta)};
  }
  double rad = r * std::sqrt(rng.uniform());
  return {rad * std::cos(theta), apex_y - h, rad * std::sin(theta)};
}

Vec3 torus_sample(Rng& rng) {
  const double R = 0.7, r = 0.28;
  while (true) {
    double theta = rng.uniform(0.0, 2.0 * M_PI);
    double phi = rng.uniform(0.0, 2.0 * M_PI);
    // Surface metric correction: accept proportional to R + r cos(phi).
    if (rng.uniform(0.0, R + r) <= R + r * std::cos(phi)) {
      double ring = R + r * std::cos(phi);
      return {ring * std::cos(theta), r * std::sin(phi), ring * std::sin(theta)};
    }
  }
}

// Long thin fuselage crossed by a wide flat wing.
Vec3 wing_sample(Rng& rng) {
  const Vec3 fuselage{0.16, 0.16, 1.0};
  const Vec3 wing{1.0, 0.07, 0.2};
  auto area = [](const Vec3& h) {
    return 8.0 * (h.x * h.y + h.y * h.z + h.x * h.z);
  };
  double u = rng.uniform(0.0, area(fuselage) + area(wing));
  return u < area(fuselage) ? box_surface_point(rng, fuselage)
                            : box_surface_point(rng, wing);
}

Vec3 bracket_sample(Rng& rng) {
  // Two slabs forming an L in the XY plane.
  const Vec3 upright{0.25, 0.9, 0.25};
  const Vec3 foot{0.9, 0.25, 0.25};
  auto area = [](const Vec3& h) {
    return 8.0 * (h.x * h.y + h.y * h.z + h.x * h.z);
  };
  double u = rng.uniform(0.0, area(upright) + area(foot));
  if (u < area(upright)) {
    Vec3 p = box_surface_point(rng, upright);
    return {p.x - 0.65, p.y, p.z};
  }
  Vec3 p = box_surface_point(rng, foot);
  return {p.x, p.y - 0.65, p.z};
}

Vec3 capsule_sample(Rng& rng) {
  const double r = 0.45, h = 0.55;
  double lateral = 2.0 * M_PI * r * 2.0 * h;
  double caps = 4.0 * M_PI * r * r;  // two hemispheres
  double u = rng.uniform(0.0, lateral + caps);
  if (u < lateral) {
    double theta = rng.uniform(0.0, 2.0 * M_PI);
    double y = rng.uniform(-h, h);
    return {r * std::cos(theta), y, r * std::sin(theta)};
  }
  Vec3 d = unit_sphere_point(rng);
  double cap_y = u - lateral < caps * 0.5 ? h : -h;
  if ((cap_y > 0.0) != (d.y > 0.0)) d.y = -d.y;
  return {r * d.x, cap_y + r * d.y, r * d.z};
}

Vec3 sample_shape(int family, Rng& rng) {
  switch (family) {
    case 0: return sphere_sample(rng);
    case 1: return cube_sample(rng);
    case 2: return cylinder_sample(rng);
    case 3: return cone_sample(rng);
    case 4: return torus_sample(rng);
    case 5: return wing_sample(rng);
    case 6: return bracket_sample(rng);
    default: return capsule_sample(rng);
  }
}

constexpr int kSurfacePoints = 2048;
constexpr int kCloudPoints = 1024;
constexpr double kNoise = 0.05;

}  // namespace

std::vector<LabeledCloud> ToyDataset::train_samples() const {
  std::vector<LabeledCloud> out;
  out.reserve(train_idx.size());
  for (std::size_t i : train_idx) {
    out.push_back({&samples[i].cloud, samples[i].label});
  }
  return out;
}

ToyDataset generate_toy_dataset(std::uint64_t seed, int classes,
                                int per_class) {
  if (classes < 2 || classes > 8) {
    throw InvalidInput("toy dataset supports 2..8 classes");
  }
  if (per_class < 2) throw InvalidInput("per_class must be >= 2");

  ToyDataset data;
  data.num_classes = classes;
  for (int k = 0; k < classes; ++k) data.class_names.push_back(kClassNames[k]);

  Rng rng(seed);
  int train_per = per_class * 4 / 5;
  if (train_per < 1) train_per = 1;
  if (train_per >= per_class) train_per = per_class - 1;

  int next_id = 0;
  for (int k = 0; k < classes; ++k) {
    for (int j = 0; j < per_class; ++j) {
      double angle = rng.uniform(0.0, 2.0 * M_PI);
      double ca = std::cos(angle), sa = std::sin(angle);
      PointCloud raw;
      raw.id = std::string(kClassNames[k]) + "_" + std::to_string(j);
      raw.points.reserve(kSurfacePoints);
      for (int p = 0; p < kSurfacePoints; ++p) {
        Vec3 q = sample_shape(k, rng);
        Vec3 rotated{q.x * ca + q.z * sa, q.y, -q.x * sa + q.z * ca};
        rotated.x += rng.uniform(-kNoise, kNoise);
        rotated.y += rng.uniform(-kNoise, kNoise);
        rotated.z += rng.uniform(-kNoise, kNoise);
        raw.points.push_back(rotated);
      }
      // Normalize before sampling so FPS distances live in render space,
      // then re-normalize the surviving subset.
      PointCloud cloud =
          normalize(farthest_point_sample(normalize(raw), kCloudPoints));
      ToySample sample;
      sample.cloud = std::move(cloud);
      sample.label = k;
      sample.id = next_id++;
      data.samples.push_back(std::move(sample));
    }
    std::size_t base = static_cast<std::size_t>(k) * per_class;
    for (int j = 0; j < per_class; ++j) {
      if (j < train_per) {
        data.train_idx.push_back(base + j);
      } else {
        data.test_idx.push_back(base + j);
      }
    }
  }
  return data;
}

// --- optimizer -------------------------------------------------------------

void SgdMomentum::step(ParamStore& store) {
  if (velocity_.empty()) {
    velocity_.resize(names_.size());
    for (std::size_t i = 0; i < names_.size(); ++i) {
      velocity_[i].assign(store.entry(names_[i]).values.size(), 0.0);
    }
  }
  for (std::size_t i = 0; i < names_.size(); ++i) {
    ParamEntry& e = store.entry(names_[i]);
    std::vector<double>& v = velocity_[i];
    for (std::size_t j = 0; j < e.values.size(); ++j) {
      v[j] = momentum_ * v[j] + e.grads[j];
      e.values[j] -= lr_ * v[j];
    }
  }
}

std::vector<std::string> entries_with_prefix(const ParamStore& store,
                                             const std::string& prefix) {
  std::vector<std::string> names;
  for (const ParamEntry& e : store.entries()) {
    if (e.name.rfind(prefix, 0) == 0) names.push_back(e.name);
  }
  return names;
}

// --- pre-training ------------------------------------------------------

void validate(const TrainConfig& cfg) {
  if (cfg.batch_size < 2) {
    throw InvalidInput(
        "contrastive training needs batch_size >= 2 (a batch of one has "
        "zero loss)");
  }
  if (cfg.epochs < 0) throw InvalidInput("epochs must be >= 0");
  if (!(cfg.learning_rate >= 0.0)) throw InvalidInput("negative learning rate");
}

ParamStore init_pretrain_store(const PipelineConfig& cfg) {
  validate(cfg.encoder);
  ParamStore store;
  Rng depth_rng(cfg.train.seed);
  init_encoder_params(store, kDepthPrefix, cfg.encoder, depth_rng);
  Rng proxy_rng(kProxyInitSeed);
  init_encoder_params(store, kProxyPrefix, cfg.encoder, proxy_rng);
  store.add(kSigmaParam, Tensor::scalar(0.0));  // sigma = exp(0) = 1
  return store;
}

namespace {

struct BatchInputs {
  std::vector<Tensor> d1, d2, dense;  // pooled encoder inputs per sample
};

// Renders and pools everything for one batch. Views/jitters are drawn by the
// caller so the random stream stays single-threaded.
BatchInputs prepare_batch(const ToyDataset& data,
                          const std::vector<std::size_t>& sample_idx,
                          const std::vector<CameraView>& v1,
                          const std::vector<CameraView>& v2,
                          const std::vector<CameraView>& dense_views,
                          const PipelineConfig& cfg) {
  BatchInputs out;
  std::size_t n = sample_idx.size();
  out.d1.resize(n);
  out.d2.resize(n);
  out.dense.resize(n);
  parallel_for(n, cfg.threads, [&](std::size_t i) {
    const PointCloud& cloud = data.samples[sample_idx[i]].cloud;
    out.d1[i] = pooled_depth_input(render(cloud, v1[i], cfg.sparse), cfg.encoder);
    out.d2[i] = pooled_depth_input(render(cloud, v2[i], cfg.sparse), cfg.encoder);
    out.dense[i] =
        pooled_depth_input(render(cloud, dense_views[i], cfg.dense), cfg.encoder);
  });
  return out;
}

struct BatchLosses {
  Var intra, cross, sigma;
};

BatchLosses batch_losses(Tape& tape, const ParamStore& store,
                         const BatchInputs& in, const PipelineConfig& cfg) {
  std::size_t n = in.d1.size();
  EncoderWeights depth_w =
      make_encoder_weights(tape, store, kDepthPrefix, cfg.encoder, true);
  EncoderWeights proxy_w =
      make_encoder_weights(tape, store, kProxyPrefix, cfg.encoder, false);
  std::vector<Var> f1(n), f2(n), fmean(n), fimg(n);
  for (std::size_t i = 0; i < n; ++i) {
    f1[i] = encode_from_input(tape, tape.constant(in.d1[i]), depth_w);
    f2[i] = encode_from_input(tape, tape.constant(in.d2[i]), depth_w);
    fmean[i] = scale(add(f1[i], f2[i]), 0.5);  // raw mean, not re-normalized
    fimg[i] = encode_from_input(tape, tape.constant(in.dense[i]), proxy_w);
  }
  BatchLosses out;
  out.intra = intra_loss(tape, f1, f2, cfg.tau);
  out.cross = cross_loss(tape, fmean, fimg, cfg.tau);
  out.sigma = vexp(tape.param(kSigmaParam));
  return out;
}

}  // namespace

PretrainResult pretrain(const ToyDataset& data, const ViewSet& views,
                        const PipelineConfig& cfg) {
  validate(cfg.train);
  validate(cfg.sparse);
  validate(cfg.dense);
  PretrainResult result;
  result.store = init_pretrain_store(cfg);
  ParamStore& store = result.store;

  std::vector<std::string> trainable =
      entries_with_prefix(store, kDepthPrefix);
  trainable.push_back(kSigmaParam);
  SgdMomentum opt(cfg.train.learning_rate, cfg.train.momentum, trainable);
  // Separate stream for the loop so adding parameters never shifts batches.
  Rng rng(cfg.train.seed + 0x9E3779B97F4A7C15ull);

  std::size_t batch = static_cast<std::size_t>(cfg.train.batch_size);
  int step = 0;
  for (int epoch = 0; epoch < cfg.train.epochs; ++epoch) {
    std::vector<std::size_t> order = data.train_idx;
    rng.shuffle(order);
    for (std::size_t start = 0; start + batch <= order.size(); start += batch) {
      std::vector<std::size_t> idx(order.begin() + start,
                                   order.begin() + start + batch);
      std::vector<CameraView> v1(batch), v2(batch), dense(batch);
      for (std::size_t i = 0; i < batch; ++i) {
        const CameraView& base =
            views.views[rng.uniform_index(views.views.size())];
        auto pair = jitter_distance(base, rng);
        v1[i] = pair.first;
        v2[i] = pair.second;
        dense[i] = base;  // proxy render at the initial distance
      }
      BatchInputs inputs = prepare_batch(data, idx, v1, v2, dense, cfg);

      StepStats stats;
      stats.step = step;
      if (cfg.train.schedule == LossSchedule::joint) {
        Tape tape(&store);
        BatchLosses losses = batch_losses(tape, store, inputs, cfg);
        Var total = total_loss(losses.intra, losses.cross, losses.sigma);
        stats.intra = tape.value(losses.intra).scalar_value();
        stats.cross = tape.value(losses.cross).scalar_value();
        stats.sigma = tape.value(losses.sigma).scalar_value();
        stats.total = tape.value(total).scalar_value();
        store.zero_grads();
        tape.backward(total);
        opt.step(store);
      } else {
        // Alternating: the balanced intra term updates first, then the
        // cross term on re-encoded features.
        {
          Tape tape(&store);
          BatchLosses losses = batch_losses(tape, store, inputs, cfg);
          Var inv_sq = vexp(scale(vlog(losses.sigma), -2.0));
          Var intra_term = add(mul(inv_sq, losses.intra),
                               vlog(add_const(losses.sigma, 1.0)));
          stats.intra = tape.value(losses.intra).scalar_value();
          stats.sigma = tape.value(losses.sigma).scalar_value();
          store.zero_grads();
          tape.backward(intra_term);
          opt.step(store);
        }
        {
          Tape tape(&store);
          BatchLosses losses = batch_losses(tape, store, inputs, cfg);
          stats.cross = tape.value(losses.cross).scalar_value();
          store.zero_grads();
          tape.backward(losses.cross);
          opt.step(store);
        }
        stats.total = stats.intra / (stats.sigma * stats.sigma) + stats.cross +
                      std::log(stats.sigma + 1.0);
      }
      result.history.push_back(stats);
      store.bump_step();
      ++step;
    }
  }
  return result;
}

void write_history_csv(const std::string& path,
                       const std::vector<StepStats>& history) {
  std::ofstream out(path);
  if (!out) throw ParseError(path + ": cannot open file for writing");
  out << "step,intra,cross,sigma,total\n";
  char line[256];
  for (const StepStats& s : history) {
    std::snprintf(line, sizeof line, "%d,%.17g,%.17g,%.17g,%.17g\n", s.step,
                  s.intra, s.cross, s.sigma, s.total);
    out << line;
  }
}

// --- evaluation ----------------------------------------------------------

namespace {

EvalResult make_eval_result(const std::vector<int>& truths,
                            const std::vector<int>& predictions,
                            const std::vector<std::string>& class_names) {
  EvalResult result;
  int k = static_cast<int>(class_names.size());
  result.confusion.assign(k, std::vector<int>(k, 0));
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    result.confusion[truths[i]][predictions[i]] += 1;
    if (truths[i] == predictions[i]) ++correct;
  }
  result.accuracy =
      static_cast<double>(correct) / static_cast<double>(truths.size());
  for (int c = 0; c < k; ++c) {
    ClassMetrics m;
    m.name = class_names[c];
    int tp = result.confusion[c][c];
    int support = 0, predicted = 0;
    for (int j = 0; j < k; ++j) {
      support += result.confusion[c][j];
      predicted += result.confusion[j][c];
    }
    m.support = support;
    m.recall = support > 0 ? static_cast<double>(tp) / support : 0.0;
    m.precision = predicted > 0 ? static_cast<double>(tp) / predicted : 0.0;
    result.per_class.push_back(m);
  }
  return result;
}

}  // namespace

EvalResult eval_zero_shot(const ToyDataset& data, const ParamStore& store,
                          const AnchorBank& anchors, const ViewSet& eval_views,
                          const PipelineConfig& cfg) {
  validate(anchors);
  std::size_t n = data.test_idx.size();
  if (n == 0) throw InvalidInput("dataset has no test split");
  std::vector<int> predictions(n, -1);
  parallel_for(n, cfg.threads, [&](std::size_t i) {
    const ToySample& sample = data.samples[data.test_idx[i]];
    Tape tape;
    EncoderWeights weights =
        make_encoder_weights(tape, store, kDepthPrefix, cfg.encoder, false);
    std::vector<Tensor> feats;
    feats.reserve(eval_views.views.size());
    for (const CameraView& view : eval_views.views) {
      DepthMap map = render(sample.cloud, view, cfg.sparse);
      Var f = encode_from_input(
          tape, tape.constant(pooled_depth_input(map, cfg.encoder)), weights);
      feats.push_back(tape.value(f));
    }
    predictions[i] = static_cast<int>(argmax(zero_shot_logits(feats, anchors)));
  });
  std::vector<int> truths(n);
  for (std::size_t i = 0; i < n; ++i) {
    truths[i] = data.samples[data.test_idx[i]].label;
  }
  return make_eval_result(truths, predictions, data.class_names);
}

double mean_pair_cosine(const ToyDataset& data, const ParamStore& store,
                        const ViewSet& views, const PipelineConfig& cfg,
                        std::uint64_t seed, std::size_t max_samples) {
  Rng rng(seed);
  std::size_t n = std::min(max_samples, data.test_idx.size());
  if (n == 0) throw InvalidInput("dataset has no test split");
  std::vector<CameraView> v1(n), v2(n);
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) {
    idx[i] = data.test_idx[i];
    const CameraView& base = views.views[rng.uniform_index(views.views.size())];
    auto pair = jitter_distance(base, rng);
    v1[i] = pair.first;
    v2[i] = pair.second;
  }
  std::vector<double> cosines(n, 0.0);
  parallel_for(n, cfg.threads, [&](std::size_t i) {
    const PointCloud& cloud = data.samples[idx[i]].cloud;
    Tensor a = encode_infer(render(cloud, v1[i], cfg.sparse), store,
                            kDepthPrefix, cfg.encoder);
    Tensor b = encode_infer(render(cloud, v2[i], cfg.sparse), store,
                            kDepthPrefix, cfg.encoder);
    double d = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) d += a[j] * b[j];
    cosines[i] = d;  // features are unit-norm
  });
  double acc = 0.0;
  for (double c : cosines) acc += c;
  return acc / static_cast<double>(n);
}

// --- supervised heads ------------------------------------------------------

HeadKind head_kind_from_string(const std::string& name) {
  if (name == "gdpa") return HeadKind::gdpa;
  if (name == "interview") return HeadKind::interview;
  if (name == "single-path" || name == "single") return HeadKind::single_path;
  throw InvalidInput("unknown head kind: " + name);
}

std::string to_string(HeadKind kind) {
  switch (kind) {
    case HeadKind::gdpa: return "gdpa";
    case HeadKind::interview: return "interview";
    default: return "single-path";
  }
}

namespace {

struct SampleFeatures {
  std::vector<Tensor> depth;  // per view
  std::vector<Tensor> proxy;
  int label = 0;
};

SampleFeatures featurize(const PointCloud& cloud, int label,
                         const ParamStore& encoders, const ViewSet& views,
                         const PipelineConfig& cfg) {
  SampleFeatures f;
  f.label = label;
  Tape tape;
  EncoderWeights depth_w =
      make_encoder_weights(tape, encoders, kDepthPrefix, cfg.encoder, false);
  EncoderWeights proxy_w =
      make_encoder_weights(tape, encoders, kProxyPrefix, cfg.encoder, false);
  for (const CameraView& view : views.views) {
    DepthMap map = render(cloud, view, cfg.sparse);
    Var input = tape.constant(pooled_depth_input(map, cfg.encoder));
    f.depth.push_back(tape.value(encode_from_input(tape, input, depth_w)));
    // The frozen tower reads the same sparse maps on the second path.
    f.proxy.push_back(tape.value(encode_from_input(tape, input, proxy_w)));
  }
  return f;
}

Var head_logits(Tape& tape, const SampleFeatures& f, const ParamStore& head,
                HeadKind kind, bool trainable, const AnchorBank& anchors,
                const std::vector<double>& alpha) {
  std::vector<Var> depth_vars, proxy_vars;
  depth_vars.reserve(f.depth.size());
  for (const Tensor& t : f.depth) depth_vars.push_back(tape.constant(t));
  switch (kind) {
    case HeadKind::gdpa:
      proxy_vars.reserve(f.proxy.size());
      for (const Tensor& t : f.proxy) proxy_vars.push_back(tape.constant(t));
      return gated_dual_path_logits(tape, depth_vars, proxy_vars, head,
                                    "head.", trainable, anchors);
    case HeadKind::interview:
      return inter_view_logits(tape, depth_vars, head, "head.", trainable,
                               anchors, alpha);
    default:
      return single_path_logits(tape, depth_vars, head, "head.", trainable,
                                anchors);
  }
}

}  // namespace

HeadResult train_head(const ToyDataset& data, const ParamStore& encoders,
                      const AnchorBank& anchors, const ViewSet& views,
                      HeadKind kind, int k_shot, const HeadConfig& head_cfg,
                      const PipelineConfig& cfg) {
  validate(anchors);
  if (head_cfg.epochs < 0) throw InvalidInput("epochs must be >= 0");

  // Deterministic k-shot subset: first k per class in id order.
  std::vector<std::size_t> subset;
  if (k_shot < 0) {
    subset = data.train_idx;
  } else {
    std::vector<int> taken(data.num_classes, 0);
    for (std::size_t i : data.train_idx) {
      int label = data.samples[i].label;
      if (taken[label] < k_shot) {
        subset.push_back(i);
        ++taken[label];
      }
    }
    for (int c = 0; c < data.num_classes; ++c) {
      if (taken[c] < k_shot) {
        throw InvalidInput("k_shot exceeds per-class train size");
      }
    }
  }

  // Precompute frozen features for the train subset and the test split.
  std::vector<SampleFeatures> train_feats(subset.size());
  parallel_for(subset.size(), cfg.threads, [&](std::size_t i) {
    const ToySample& s = data.samples[subset[i]];
    train_feats[i] = featurize(s.cloud, s.label, encoders, views, cfg);
  });
  std::vector<SampleFeatures> test_feats(data.test_idx.size());
  parallel_for(data.test_idx.size(), cfg.threads, [&](std::size_t i) {
    const ToySample& s = data.samples[data.test_idx[i]];
    test_feats[i] = featurize(s.cloud, s.label, encoders, views, cfg);
  });

  int num_views = static_cast<int>(views.views.size());
  int dim = cfg.encoder.out_dim;
  std::vector<double> alpha = uniform_alpha(views.views.size());

  HeadResult result;
  Rng rng(head_cfg.seed);
  switch (kind) {
    case HeadKind::gdpa:
      init_dual_path_params(result.head, "head.", num_views, dim, rng);
      break;
    case HeadKind::interview:
      init_inter_view_params(result.head, "head.", num_views, dim, rng);
      break;
    default:
      init_single_path_params(result.head, "head.", num_views, dim, rng);
  }

  std::vector<std::string> names;
  for (const ParamEntry& e : result.head.entries()) names.push_back(e.name);
  SgdMomentum opt(head_cfg.learning_rate, head_cfg.momentum, names);

  std::size_t batch = static_cast<std::size_t>(std::max(1, head_cfg.batch_size));
  std::vector<std::size_t> order(train_feats.size());
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 0; epoch < head_cfg.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < order.size(); start += batch) {
      std::size_t end = std::min(order.size(), start + batch);
      Tape tape(&result.head);
      Var acc = tape.constant(Tensor::scalar(0.0));
      for (std::size_t i = start; i < end; ++i) {
        const SampleFeatures& f = train_feats[order[i]];
        Var logits = head_logits(tape, f, result.head, kind, true, anchors,
                                 alpha);
        acc = add(acc, cross_entropy(logits, static_cast<std::size_t>(f.label)));
      }
      Var loss = scale(acc, 1.0 / static_cast<double>(end - start));
      result.head.zero_grads();
      tape.backward(loss);
      opt.step(result.head);
      result.head.bump_step();
    }
  }

  // Test accuracy.
  std::size_t n = test_feats.size();
  std::vector<int> predictions(n, -1);
  std::vector<int> truths(n);
  parallel_for(n, cfg.threads, [&](std::size_t i) {
    Tape tape;
    Var logits =
        head_logits(tape, test_feats[i], result.head, kind, false, anchors, alpha);
    const Tensor& l = tape.value(logits);
    predictions[i] = static_cast<int>(
        argmax(std::vector<double>(l.values().begin(), l.values().end())));
  });
  for (std::size_t i = 0; i < n; ++i) truths[i] = test_feats[i].label;
  result.eval = make_eval_result(truths, predictions, data.class_names);
  result.accuracy = result.eval.accuracy;
  return result;
}

}  // namespace c2p
