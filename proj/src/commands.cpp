#include "c2p/commands.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "c2p/data_io.hpp"
#include "json.hpp"

namespace c2p {

namespace {

using json = nlohmann::ordered_json;

json echo_render(const RenderConfig& r) {
  return json{{"resolution", r.resolution},
              {"dilation", r.dilation},
              {"rule", to_string(r.rule)},
              {"focal", r.focal},
              {"epsilon", r.epsilon}};
}

json echo_config(const RunConfig& cfg) {
  json j;
  j["render"] = echo_render(cfg.pipeline.sparse);
  j["dense"] = echo_render(cfg.pipeline.dense);
  j["encoder"] = {{"patch_grid", cfg.pipeline.encoder.patch_grid},
                  {"hidden", cfg.pipeline.encoder.hidden},
                  {"out_dim", cfg.pipeline.encoder.out_dim},
                  {"layers", cfg.pipeline.encoder.layers}};
  j["train"] = {{"epochs", cfg.pipeline.train.epochs},
                {"batch_size", cfg.pipeline.train.batch_size},
                {"learning_rate", cfg.pipeline.train.learning_rate},
                {"momentum", cfg.pipeline.train.momentum},
                {"seed", cfg.pipeline.train.seed},
                {"loss_schedule",
                 cfg.pipeline.train.schedule == LossSchedule::joint
                     ? "joint"
                     : "alternating"}};
  j["head"] = {{"epochs", cfg.head.epochs},
               {"batch_size", cfg.head.batch_size},
               {"learning_rate", cfg.head.learning_rate},
               {"momentum", cfg.head.momentum},
               {"seed", cfg.head.seed}};
  j["views"] = {{"corner_elevation", cfg.pipeline.corner_elevation}};
  j["loss"] = {{"tau", cfg.pipeline.tau}};
  j["data"] = {{"seed", cfg.data_seed},
               {"classes", cfg.data_classes},
               {"per_class", cfg.data_per_class}};
  j["run"] = {{"threads", cfg.pipeline.threads}};
  return j;
}

json eval_to_json(const EvalResult& eval) {
  json per_class = json::object();
  for (const ClassMetrics& m : eval.per_class) {
    per_class[m.name] = {{"precision", m.precision},
                         {"recall", m.recall},
                         {"support", m.support}};
  }
  return json{{"accuracy", eval.accuracy},
              {"per_class", per_class},
              {"confusion", eval.confusion}};
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ParseError(path + ": cannot open file for writing");
  out << j.dump(2) << "\n";
}

void print_eval_table(const EvalResult& eval) {
  std::printf("%-10s %9s %9s %8s\n", "class", "precision", "recall", "support");
  for (const ClassMetrics& m : eval.per_class) {
    std::printf("%-10s %9.4f %9.4f %8d\n", m.name.c_str(), m.precision,
                m.recall, m.support);
  }
  std::printf("accuracy: %.4f\n", eval.accuracy);
}

ToyDataset dataset_from_config(const RunConfig& cfg) {
  return generate_toy_dataset(cfg.data_seed, cfg.data_classes,
                              cfg.data_per_class);
}

// Loads a checkpoint, or builds the untrained baseline when `path` is the
// literal "none" (fresh seeded depth tower against the fixed proxy).
ParamStore store_from_checkpoint(const std::string& path,
                                 const PipelineConfig& cfg) {
  if (path == "none") return init_pretrain_store(cfg);
  return load_checkpoint(path);
}

AnchorBank anchors_for(const ParamStore& store, const ToyDataset& data,
                       const RunConfig& cfg) {
  if (store_has_anchors(store)) return anchors_from_store(store);
  return build_anchor_bank(data.train_samples(), data.num_classes,
                           data.class_names, store, cfg.pipeline.encoder,
                           spherical_views(cfg.pipeline.corner_elevation),
                           cfg.pipeline.dense, cfg.pipeline.threads);
}

}  // namespace

ViewSet view_set_from_name(const std::string& name, double corner_elevation) {
  if (name == "orth6") return orthogonal_views();
  if (name == "sph10") return spherical_views(corner_elevation);
  throw ParseError("unknown view set '" + name + "' (use orth6|sph10)");
}

void run_render(const RenderCommand& cmd) {
  ViewSet views =
      view_set_from_name(cmd.views, cmd.cfg.pipeline.corner_elevation);
  PointCloud cloud =
      normalize(load_cloud(cmd.input_path, cloud_format_for_path(cmd.input_path)));

  std::filesystem::create_directories(cmd.out_dir);
  std::vector<DepthMap> maps =
      render_views(cloud, views, cmd.cfg.pipeline.sparse, cmd.cfg.pipeline.threads);

  json manifest;
  manifest["input"] = cmd.input_path;
  manifest["view_set"] = cmd.views;
  json view_list = json::array();
  json outputs = json::array();
  for (std::size_t i = 0; i < maps.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "view_%02zu.pgm", i);
    std::string out_path = (std::filesystem::path(cmd.out_dir) / name).string();
    save_depth_pgm(maps[i], out_path);
    const CameraView& v = views.views[i];
    view_list.push_back({{"azimuth", v.azimuth},
                         {"elevation", v.elevation},
                         {"distance", v.distance},
                         {"occupied", maps[i].occupied_count()}});
    outputs.push_back(name);
  }
  manifest["views"] = view_list;
  manifest["outputs"] = outputs;
  manifest["config_echo"] = echo_config(cmd.cfg);
  write_json((std::filesystem::path(cmd.out_dir) / "manifest.json").string(),
             manifest);
  std::printf("rendered %zu views of %s into %s\n", maps.size(),
              cmd.input_path.c_str(), cmd.out_dir.c_str());
}

void run_pretrain(const PretrainCommand& cmd) {
  ToyDataset data = dataset_from_config(cmd.cfg);
  ViewSet views = spherical_views(cmd.cfg.pipeline.corner_elevation);
  PretrainResult result = pretrain(data, views, cmd.cfg.pipeline);

  AnchorBank anchors = build_anchor_bank(
      data.train_samples(), data.num_classes, data.class_names, result.store,
      cmd.cfg.pipeline.encoder, views, cmd.cfg.pipeline.dense,
      cmd.cfg.pipeline.threads);
  anchors_to_store(anchors, result.store);

  save_checkpoint(result.store, cmd.checkpoint_path);
  write_history_csv(cmd.history_path, result.history);

  json run_meta;
  run_meta["checkpoint"] = cmd.checkpoint_path;
  run_meta["history"] = cmd.history_path;
  run_meta["steps"] = result.history.size();
  run_meta["config_echo"] = echo_config(cmd.cfg);
  write_json(cmd.checkpoint_path + ".json", run_meta);
  if (!result.history.empty()) {
    const StepStats& last = result.history.back();
    std::printf("pretrain: %zu steps, final intra %.4f cross %.4f sigma %.4f\n",
                result.history.size(), last.intra, last.cross, last.sigma);
  } else {
    std::printf("pretrain: 0 steps (checkpoint equals initialization)\n");
  }
  std::printf("checkpoint: %s\nhistory: %s\n", cmd.checkpoint_path.c_str(),
              cmd.history_path.c_str());
}

double run_zeroshot(const ZeroShotCommand& cmd) {
  ParamStore store = store_from_checkpoint(cmd.checkpoint_path, cmd.cfg.pipeline);
  ToyDataset data = dataset_from_config(cmd.cfg);
  AnchorBank anchors = anchors_for(store, data, cmd.cfg);
  EvalResult eval =
      eval_zero_shot(data, store, anchors, orthogonal_views(), cmd.cfg.pipeline);

  json metrics = eval_to_json(eval);
  metrics["checkpoint"] = cmd.checkpoint_path;
  metrics["eval_views"] = "orth6";
  metrics["config_echo"] = echo_config(cmd.cfg);
  if (!cmd.metrics_path.empty()) write_json(cmd.metrics_path, metrics);
  print_eval_table(eval);
  return eval.accuracy;
}

double run_fewshot(const FewShotCommand& cmd) {
  HeadKind kind = head_kind_from_string(cmd.head);  // before any heavy work
  ParamStore store = store_from_checkpoint(cmd.checkpoint_path, cmd.cfg.pipeline);
  ToyDataset data = dataset_from_config(cmd.cfg);
  AnchorBank anchors = anchors_for(store, data, cmd.cfg);
  ViewSet views = spherical_views(cmd.cfg.pipeline.corner_elevation);
  HeadResult result = train_head(data, store, anchors, views, kind, cmd.k_shot,
                                 cmd.cfg.head, cmd.cfg.pipeline);

  json metrics = eval_to_json(result.eval);
  metrics["checkpoint"] = cmd.checkpoint_path;
  metrics["head"] = to_string(kind);
  metrics["k_shot"] = cmd.k_shot;
  metrics["config_echo"] = echo_config(cmd.cfg);
  if (!cmd.metrics_path.empty()) write_json(cmd.metrics_path, metrics);
  print_eval_table(result.eval);
  return result.accuracy;
}

void run_bench(const BenchCommand& cmd) {
  Rng rng(42);
  PointCloud cloud;
  while (cloud.points.size() < 1024) {
    Vec3 p{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
           rng.uniform(-1.0, 1.0)};
    if (p.squared_norm() <= 1.0) cloud.points.push_back(p);
  }
  cloud = normalize(cloud);
  ViewSet views = spherical_views(cmd.cfg.pipeline.corner_elevation);
  const RenderConfig& rc = cmd.cfg.pipeline.sparse;

  int max_threads = cmd.max_threads > 0 ? cmd.max_threads
                                        : std::max(1, cmd.cfg.pipeline.threads);
  std::printf("render throughput, %d points, %zu views, %dx%d, R=%d, rule=%s\n",
              1024, views.views.size(), rc.resolution, rc.resolution,
              rc.dilation, to_string(rc.rule).c_str());
  std::vector<int> thread_counts;
  for (int t = 1; t < max_threads; t *= 2) thread_counts.push_back(t);
  thread_counts.push_back(max_threads);

  std::printf("%8s %12s %14s\n", "threads", "maps/sec", "points/sec");
  for (int t : thread_counts) {
    // Warm-up pass, then timed repeats.
    render_views(cloud, views, rc, t);
    auto start = std::chrono::steady_clock::now();
    for (int r = 0; r < cmd.repeats; ++r) render_views(cloud, views, rc, t);
    auto stop = std::chrono::steady_clock::now();
    double seconds = std::chrono::duration<double>(stop - start).count();
    double maps = static_cast<double>(views.views.size()) * cmd.repeats;
    double maps_per_sec = maps / seconds;
    std::printf("%8d %12.1f %14.3e\n", t, maps_per_sec,
                maps_per_sec * 1024.0);
  }
}

}  // namespace c2p
