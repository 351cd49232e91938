// c2p command-line tool: depth rendering, contrastive pre-training of the
// depth tower, zero-shot / few-shot evaluation, and a render benchmark.

#include <cstdio>
#include <cstdlib>
#include <string>

#include "CLI11.hpp"
#include "c2p/commands.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

int resolve_threads(int flag_value) {
  if (flag_value > 0) return flag_value;
  const char* env = std::getenv("C2P_THREADS");
  if (env != nullptr) {
    int parsed = std::atoi(env);
    if (parsed > 0) return parsed;
  }
  return c2p::default_thread_count();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"point-cloud depth rendering and contrastive pre-training"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 7;
  int threads = 0;
  app.add_option("--config", config_path, "TOML-style config file");
  app.add_option("--seed", seed, "training seed (default 7)");
  app.add_option("--threads", threads,
                 "worker threads (default: C2P_THREADS or all cores)");

  // render
  auto* render = app.add_subcommand("render", "project a cloud to depth maps");
  std::string input, views = "sph10", rule, out_dir = "renders";
  int dilation = 0, resolution = 0;
  render->add_option("--input", input, "cloud file (.xyz or .off)")->required();
  render->add_option("--views", views, "orth6|sph10 (default sph10)");
  render->add_option("--rule", rule, "min|weighted");
  render->add_option("--dilation", dilation, "dilation rate R");
  render->add_option("--resolution", resolution, "frame side in pixels");
  render->add_option("--out", out_dir, "output directory (default renders)");

  // pretrain
  auto* pretrain = app.add_subcommand("pretrain", "contrastive pre-training");
  std::string checkpoint = "checkpoint.c2pt", history = "history.csv";
  int epochs = -1, batch_size = -1;
  pretrain->add_option("--checkpoint", checkpoint, "output checkpoint path");
  pretrain->add_option("--history", history, "output loss-history CSV");
  pretrain->add_option("--epochs", epochs, "training epochs");
  pretrain->add_option("--batch", batch_size, "batch size");

  // zeroshot
  auto* zeroshot = app.add_subcommand("zeroshot", "zero-shot evaluation");
  std::string zs_checkpoint = "none", zs_metrics = "zeroshot_metrics.json";
  zeroshot->add_option("--checkpoint", zs_checkpoint,
                       "checkpoint path, or 'none' for the untrained baseline");
  zeroshot->add_option("--metrics", zs_metrics, "output metrics JSON");

  // fewshot
  auto* fewshot = app.add_subcommand("fewshot", "train and evaluate a head");
  std::string fs_checkpoint = "none", fs_metrics = "fewshot_metrics.json";
  std::string head = "gdpa";
  int k_shot = 16;
  bool full = false;
  fewshot->add_option("--checkpoint", fs_checkpoint,
                      "checkpoint path, or 'none' for untrained encoders");
  fewshot->add_option("--metrics", fs_metrics, "output metrics JSON");
  fewshot->add_option("--head", head, "gdpa|interview|single-path");
  fewshot->add_option("--k", k_shot, "samples per class (default 16)");
  fewshot->add_flag("--full", full, "train on the full split instead of k");

  // bench
  auto* bench = app.add_subcommand("bench", "render throughput table");
  int repeats = 3;
  bench->add_option("--repeats", repeats, "timed repetitions per row");

  CLI11_PARSE(app, argc, argv);

  try {
    c2p::RunConfig cfg;
    if (!config_path.empty()) cfg = c2p::parse_config_file(config_path);
    if (app.count("--seed") > 0) {
      cfg.pipeline.train.seed = seed;
      cfg.head.seed = seed;
    }
    cfg.pipeline.threads = resolve_threads(threads);

    if (render->parsed()) {
      c2p::RenderCommand cmd;
      if (!rule.empty()) {
        cfg.pipeline.sparse.rule = c2p::depth_rule_from_string(rule);
      }
      if (dilation > 0) cfg.pipeline.sparse.dilation = dilation;
      if (resolution > 0) cfg.pipeline.sparse.resolution = resolution;
      cmd.cfg = cfg;
      cmd.input_path = input;
      cmd.views = views;
      cmd.out_dir = out_dir;
      c2p::run_render(cmd);
    } else if (pretrain->parsed()) {
      c2p::PretrainCommand cmd;
      if (epochs >= 0) cfg.pipeline.train.epochs = epochs;
      if (batch_size > 0) cfg.pipeline.train.batch_size = batch_size;
      cmd.cfg = cfg;
      cmd.checkpoint_path = checkpoint;
      cmd.history_path = history;
      c2p::run_pretrain(cmd);
    } else if (zeroshot->parsed()) {
      c2p::ZeroShotCommand cmd;
      cmd.cfg = cfg;
      cmd.checkpoint_path = zs_checkpoint;
      cmd.metrics_path = zs_metrics;
      c2p::run_zeroshot(cmd);
    } else if (fewshot->parsed()) {
      c2p::FewShotCommand cmd;
      cmd.cfg = cfg;
      cmd.checkpoint_path = fs_checkpoint;
      cmd.metrics_path = fs_metrics;
      cmd.head = head;
      cmd.k_shot = full ? -1 : k_shot;
      c2p::run_fewshot(cmd);
    } else if (bench->parsed()) {
      c2p::BenchCommand cmd;
      cmd.cfg = cfg;
      cmd.repeats = repeats;
      c2p::run_bench(cmd);
    }
  } catch (const c2p::NumericsError& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return kExitNumeric;
  } catch (const c2p::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }
  return 0;
}
