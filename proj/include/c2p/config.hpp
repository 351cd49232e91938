#pragma once

#include <string>

#include "c2p/pipeline.hpp"

namespace c2p {

// Run-wide configuration assembled from an optional TOML-style file plus
// command-line overrides. The file is sections of `key = value` pairs;
// unknown sections or keys are rejected.
//
//   [render]   resolution, dilation, rule ("min"|"weighted"), focal, epsilon
//   [dense]    resolution, dilation, rule, focal, epsilon (proxy-render pass)
//   [encoder]  patch_grid, hidden, out_dim, layers
//   [train]    epochs, batch_size, learning_rate, momentum, seed,
//              loss_schedule ("joint"|"alternating")
//   [head]     epochs, batch_size, learning_rate, momentum, seed
//   [views]    corner_elevation
//   [loss]     tau
//   [data]     seed, classes, per_class
//   [run]      threads
struct RunConfig {
  PipelineConfig pipeline;
  HeadConfig head;
  std::uint64_t data_seed = 1;
  int data_classes = 8;
  int data_per_class = 250;
};

RunConfig parse_config_file(const std::string& path);

DepthRule depth_rule_from_string(const std::string& name);
std::string to_string(DepthRule rule);

}  // namespace c2p
