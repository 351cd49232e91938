#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "c2p/geometry.hpp"
#include "c2p/views.hpp"

namespace c2p {

enum class DepthRule { minimum, weighted };

struct RenderConfig {
  int resolution = 224;   // square frame
  int dilation = 2;       // R: side length of the pixel block per point
  DepthRule rule = DepthRule::minimum;
  double focal = 100.0;   // projection scale; unit sphere at distance 1
                          // fills ~90% of a 224 frame
  double epsilon = 1e-12; // weighted-rule numerator guard
};

void validate(const RenderConfig& cfg);  // resolution >= 8, dilation >= 1

// H x W depth grid. depth holds camera-space z of the winning point and is
// zero exactly where occupied is false.
struct DepthMap {
  int width = 0;
  int height = 0;
  std::vector<double> depth;
  std::vector<std::uint8_t> occupied;

  DepthMap() = default;
  DepthMap(int w, int h)
      : width(w), height(h),
        depth(static_cast<std::size_t>(w) * h, 0.0),
        occupied(static_cast<std::size_t>(w) * h, 0) {}

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * width + x;
  }
  double at(int x, int y) const { return depth[index(x, y)]; }
  bool is_occupied(int x, int y) const { return occupied[index(x, y)] != 0; }
  std::size_t occupied_count() const;
};

// Orthonormal camera frame: camera at `eye` looking at the origin,
// `forward` is +z into the screen. Polar views fall back to right = +X.
struct CameraBasis {
  Vec3 eye, right, up, forward;
};

CameraBasis camera_basis(const CameraView& view);

inline Vec3 to_camera(const Vec3& p, const CameraBasis& cam) {
  Vec3 d = p - cam.eye;
  return {cam.right.dot(d), cam.up.dot(d), cam.forward.dot(d)};
}

// Integer pixel a camera-space point projects to:
//   (ceil(focal*x/z + W/2), ceil(focal*y/z + H/2)).
// May lie outside the frame; callers clip. nullopt when z <= 0 (behind).
struct Pixel {
  long long x = 0;
  long long y = 0;
};
std::optional<Pixel> project_point(const Vec3& cam_p, const RenderConfig& cfg);

// Indices of the points whose projected pixel p satisfies
//   px - R/2 <= proj.x < px + R/2  (and likewise in y),
// evaluated directly per point. Points behind the camera never match.
std::vector<std::size_t> matching_set(const std::vector<Vec3>& cam_points,
                                      const Pixel& pixel, int dilation,
                                      const RenderConfig& cfg);

// Projects a normalized cloud to a depth map. minimum keeps the nearest z
// per pixel; weighted applies (sum z/(z+eps)) / (sum 1/z) over the matching
// set, summing in point-index order. Throws InvalidInput when the cloud's
// max norm exceeds 1 + 1e-6.
DepthMap render(const PointCloud& cloud, const CameraView& view,
                const RenderConfig& cfg);

// render() mapped over a view set, order preserved. With threads > 1 the
// views render in parallel; results are identical to the sequential path.
std::vector<DepthMap> render_views(const PointCloud& cloud,
                                   const ViewSet& views,
                                   const RenderConfig& cfg, int threads = 1);

}  // namespace c2p
