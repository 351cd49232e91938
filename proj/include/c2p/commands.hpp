#pragma once

#include <string>

#include "c2p/config.hpp"

namespace c2p {

// Subcommand entry points shared by the CLI binary and the test suites.
// They throw the library error types; the CLI maps those to exit codes
// (2 for config/parse problems, 3 for runtime numeric failures).

struct RenderCommand {
  RunConfig cfg;
  std::string input_path;
  std::string views = "sph10";  // orth6|sph10
  std::string out_dir;
};
void run_render(const RenderCommand& cmd);

struct PretrainCommand {
  RunConfig cfg;
  std::string checkpoint_path;  // output
  std::string history_path;     // output CSV
};
void run_pretrain(const PretrainCommand& cmd);

struct ZeroShotCommand {
  RunConfig cfg;
  std::string checkpoint_path;  // "none" runs the untrained baseline
  std::string metrics_path;     // output JSON
};
double run_zeroshot(const ZeroShotCommand& cmd);

struct FewShotCommand {
  RunConfig cfg;
  std::string checkpoint_path;  // "none" runs untrained encoders
  std::string metrics_path;
  std::string head = "gdpa";  // gdpa|interview|single-path
  int k_shot = 16;            // -1 trains on the full split
};
double run_fewshot(const FewShotCommand& cmd);

struct BenchCommand {
  RunConfig cfg;
  int max_threads = 0;  // 0 = up to the run config thread count
  int repeats = 3;
};
void run_bench(const BenchCommand& cmd);

ViewSet view_set_from_name(const std::string& name, double corner_elevation);

}  // namespace c2p
