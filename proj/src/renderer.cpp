#include "c2p/renderer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace c2p {

namespace {

// Clamp before the double->integer cast: near-zero z sends pixels to
// astronomical coordinates that must stay "far out of frame" without UB.
constexpr double kPixelClamp = 1e12;

long long to_pixel_coord(double v) {
  double c = std::ceil(v);
  if (c > kPixelClamp) c = kPixelClamp;
  if (c < -kPixelClamp) c = -kPixelClamp;
  return static_cast<long long>(c);
}

void check_normalized(const PointCloud& cloud) {
  for (const Vec3& p : cloud.points) {
    if (p.squared_norm() > (1.0 + 1e-6) * (1.0 + 1e-6)) {
      throw InvalidInput("render expects a normalized cloud (max norm <= 1)");
    }
  }
}

}  // namespace

void validate(const RenderConfig& cfg) {
  if (cfg.resolution < 8) throw InvalidInput("resolution must be >= 8");
  if (cfg.dilation < 1) throw InvalidInput("dilation must be >= 1");
  if (!(cfg.focal > 0.0)) throw InvalidInput("focal must be positive");
  if (!(cfg.epsilon > 0.0)) throw InvalidInput("epsilon must be positive");
}

std::size_t DepthMap::occupied_count() const {
  std::size_t n = 0;
  for (std::uint8_t o : occupied) n += o;
  return n;
}

CameraBasis camera_basis(const CameraView& view) {
  validate(view);
  CameraBasis cam;
  Vec3 dir = view_direction(view);
  cam.eye = dir * view.distance;
  cam.forward = dir * -1.0;  // look at the origin
  Vec3 world_up{0.0, 1.0, 0.0};
  Vec3 r = cam.forward.cross(world_up);
  if (r.squared_norm() < 1e-18) {
    // Polar view: continuous limit of the azimuth-0 frame.
    r = Vec3{1.0, 0.0, 0.0};
  }
  cam.right = r.normalized();
  cam.up = cam.right.cross(cam.forward);
  return cam;
}

std::optional<Pixel> project_point(const Vec3& cam_p, const RenderConfig& cfg) {
  if (cam_p.z <= 0.0) return std::nullopt;
  double half_w = cfg.resolution * 0.5;
  Pixel px;
  px.x = to_pixel_coord(cfg.focal * cam_p.x / cam_p.z + half_w);
  px.y = to_pixel_coord(cfg.focal * cam_p.y / cam_p.z + half_w);
  return px;
}

std::vector<std::size_t> matching_set(const std::vector<Vec3>& cam_points,
                                      const Pixel& pixel, int dilation,
                                      const RenderConfig& cfg) {
  if (dilation < 1) throw InvalidInput("dilation must be >= 1");
  std::vector<std::size_t> out;
  double half_r = dilation * 0.5;
  for (std::size_t i = 0; i < cam_points.size(); ++i) {
    auto proj = project_point(cam_points[i], cfg);
    if (!proj) continue;
    double px = static_cast<double>(proj->x);
    double py = static_cast<double>(proj->y);
    if (pixel.x - half_r <= px && px < pixel.x + half_r &&
        pixel.y - half_r <= py && py < pixel.y + half_r) {
      out.push_back(i);
    }
  }
  return out;
}

DepthMap render(const PointCloud& cloud, const CameraView& view,
                const RenderConfig& cfg) {
  validate(cfg);
  validate(cloud);
  check_normalized(cloud);

  CameraBasis cam = camera_basis(view);
  const int res = cfg.resolution;
  const int r = cfg.dilation;
  // A point's projected pixel p covers the block starting at p - (R-1)/2.
  const long long block_off = (r - 1) / 2;

  DepthMap map(res, res);
  std::vector<double> num, den;
  if (cfg.rule == DepthRule::weighted) {
    num.assign(map.depth.size(), 0.0);
    den.assign(map.depth.size(), 0.0);
  }

  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    Vec3 p = to_camera(cloud.points[i], cam);
    auto proj = project_point(p, cfg);
    if (!proj) continue;  // behind the camera
    long long x0 = proj->x - block_off;
    long long y0 = proj->y - block_off;
    long long xa = std::max<long long>(x0, 0);
    long long xb = std::min<long long>(x0 + r, res);
    long long ya = std::max<long long>(y0, 0);
    long long yb = std::min<long long>(y0 + r, res);
    for (long long y = ya; y < yb; ++y) {
      for (long long x = xa; x < xb; ++x) {
        std::size_t idx = map.index(static_cast<int>(x), static_cast<int>(y));
        if (cfg.rule == DepthRule::minimum) {
          if (!map.occupied[idx] || p.z < map.depth[idx]) {
            map.depth[idx] = p.z;
            map.occupied[idx] = 1;
          }
        } else {
          num[idx] += p.z / (p.z + cfg.epsilon);
          den[idx] += 1.0 / p.z;
        }
      }
    }
  }

  if (cfg.rule == DepthRule::weighted) {
    for (std::size_t idx = 0; idx < map.depth.size(); ++idx) {
      if (den[idx] > 0.0) {
        map.depth[idx] = num[idx] / den[idx];
        map.occupied[idx] = 1;
      }
    }
  }

  for (double d : map.depth) {
    if (!std::isfinite(d)) throw NumericsError("non-finite depth value");
  }
  return map;
}

std::vector<DepthMap> render_views(const PointCloud& cloud,
                                   const ViewSet& views,
                                   const RenderConfig& cfg, int threads) {
  std::vector<DepthMap> maps(views.views.size());
  parallel_for(views.views.size(), threads, [&](std::size_t i) {
    maps[i] = render(cloud, views.views[i], cfg);
  });
  return maps;
}

}  // namespace c2p
