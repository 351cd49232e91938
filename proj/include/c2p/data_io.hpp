#pragma once

#include <string>

#include "c2p/geometry.hpp"
#include "c2p/param_store.hpp"
#include "c2p/renderer.hpp"

namespace c2p {

enum class CloudFormat { xyz_ascii, off };

// Guesses from the extension (.off -> off, anything else xyz).
CloudFormat cloud_format_for_path(const std::string& path);

// xyz: one "x y z" triple per non-blank line. off: header + vertex list,
// faces ignored. All failures are ParseError with a line diagnostic.
PointCloud load_cloud(const std::string& path, CloudFormat format);

// 16-bit binary PGM (P5, maxval 65535, big-endian samples). Occupied depths
// map linearly from [min z, max z] to [65535, 1]; empty pixels are 0. The
// depth range rides along in a "# zrange <min> <max>" comment so loading
// reconstructs depths up to the quantization step. Occupancy round-trips
// exactly, and save(load(save(m))) is byte-identical to save(m).
void save_depth_pgm(const DepthMap& map, const std::string& path);
DepthMap load_depth_pgm(const std::string& path);

// Checkpoint layout (all integers little-endian):
//   magic "C2PT" | version u32 | entry count u64 |
//   per entry: name length u64, name bytes, rank u64, dims u64 each,
//              values as f64 little-endian.
// Gradients are not persisted; loads start with zero grads.
inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const ParamStore& store, const std::string& path);
ParamStore load_checkpoint(const std::string& path);

}  // namespace c2p
