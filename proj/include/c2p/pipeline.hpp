#pragma once

#include <string>
#include <vector>

#include "c2p/adapters.hpp"
#include "c2p/encoders.hpp"
#include "c2p/losses.hpp"

namespace c2p {

// --- toy dataset -------------------------------------------------------

struct ToySample {
  PointCloud cloud;  // 1,024 points, unit-sphere normalized
  int label = 0;
  int id = 0;
};

struct ToyDataset {
  std::vector<ToySample> samples;
  std::vector<std::size_t> train_idx;
  std::vector<std::size_t> test_idx;
  std::vector<std::string> class_names;
  int num_classes = 0;

  std::vector<LabeledCloud> train_samples() const;
};

// Eight parametric shape families sampled to 2,048 surface points with a
// per-sample rotation about Y and +-5% coordinate noise, normalized,
// farthest-point sampled to 1,024 and normalized again. Deterministic per
// seed. Split is the first 80% of each class for training, the rest test.
ToyDataset generate_toy_dataset(std::uint64_t seed, int classes = 8,
                                int per_class = 250);

// --- training ----------------------------------------------------------

enum class LossSchedule { joint, alternating };

struct TrainConfig {
  int epochs = 15;
  int batch_size = 32;
  double learning_rate = 0.05;
  double momentum = 0.9;
  std::uint64_t seed = 7;
  LossSchedule schedule = LossSchedule::joint;
};

void validate(const TrainConfig& cfg);  // batch_size >= 2 etc.

struct PipelineConfig {
  EncoderSpec encoder;
  RenderConfig sparse;  // depth-tower input: minimum rule, R=2
  RenderConfig dense;   // proxy-tower input: weighted rule, R=4
  TrainConfig train;
  double tau = kDefaultTau;
  double corner_elevation = kDefaultCornerElevation;
  int threads = 1;

  PipelineConfig() {
    dense.rule = DepthRule::weighted;
    dense.dilation = 4;
  }
};

struct StepStats {
  int step = 0;
  double intra = 0.0;
  double cross = 0.0;
  double sigma = 0.0;
  double total = 0.0;
};

inline constexpr const char* kSigmaParam = "balance.log_sigma";

// Fresh store with the trainable depth tower (seeded from cfg.train.seed),
// the frozen proxy tower (fixed seed) and log sigma.
ParamStore init_pretrain_store(const PipelineConfig& cfg);

struct PretrainResult {
  ParamStore store;
  std::vector<StepStats> history;
};

// Contrastive pre-training. Per step and sample: one random view from the
// set, distance jittered into a pair of sparse renders for the depth tower
// plus one dense render at distance 1 for the frozen proxy; NT-Xent losses
// balanced by sigma; SGD with momentum updates the depth tower and
// log sigma only.
PretrainResult pretrain(const ToyDataset& data, const ViewSet& views,
                        const PipelineConfig& cfg);

void write_history_csv(const std::string& path,
                       const std::vector<StepStats>& history);

// --- evaluation --------------------------------------------------------

struct ClassMetrics {
  std::string name;
  double precision = 0.0;
  double recall = 0.0;
  int support = 0;
};

struct EvalResult {
  double accuracy = 0.0;
  std::vector<std::vector<int>> confusion;  // [true][predicted]
  std::vector<ClassMetrics> per_class;
};

EvalResult eval_zero_shot(const ToyDataset& data, const ParamStore& store,
                          const AnchorBank& anchors, const ViewSet& eval_views,
                          const PipelineConfig& cfg);

// Mean cos(F_d1, F_d2) over jitter pairs of the test split; the quantity
// intra-modality training pushes up.
double mean_pair_cosine(const ToyDataset& data, const ParamStore& store,
                        const ViewSet& views, const PipelineConfig& cfg,
                        std::uint64_t seed, std::size_t max_samples = 64);

// --- supervised heads ----------------------------------------------------

enum class HeadKind { gdpa, interview, single_path };

HeadKind head_kind_from_string(const std::string& name);
std::string to_string(HeadKind kind);

struct HeadConfig {
  int epochs = 60;
  int batch_size = 16;
  double learning_rate = 0.5;
  double momentum = 0.9;
  std::uint64_t seed = 7;
};

struct HeadResult {
  double accuracy = 0.0;
  EvalResult eval;
  ParamStore head;
};

// Freezes both towers, trains only head parameters by cross-entropy on the
// k-shot subset (first k per class by sample id; k < 0 means the full train
// split), then reports test accuracy. Per-view features for both paths are
// precomputed once from sparse renders.
HeadResult train_head(const ToyDataset& data, const ParamStore& encoders,
                      const AnchorBank& anchors, const ViewSet& views,
                      HeadKind kind, int k_shot, const HeadConfig& head_cfg,
                      const PipelineConfig& cfg);

// --- optimizer -----------------------------------------------------------

// Plain SGD with momentum over an explicit set of entry names.
class SgdMomentum {
 public:
  SgdMomentum(double lr, double momentum, std::vector<std::string> names)
      : lr_(lr), momentum_(momentum), names_(std::move(names)) {}

  void step(ParamStore& store);

 private:
  double lr_;
  double momentum_;
  std::vector<std::string> names_;
  std::vector<std::vector<double>> velocity_;
};

std::vector<std::string> entries_with_prefix(const ParamStore& store,
                                             const std::string& prefix);

}  // namespace c2p
