#include "c2p/views.hpp"

#include <cmath>

namespace c2p {

void validate(const CameraView& view) {
  if (!(view.distance > 0.0)) {
    throw InvalidInput("camera distance must be positive");
  }
  if (std::abs(view.elevation) > M_PI / 2.0 + 1e-12) {
    throw InvalidInput("camera elevation must lie in [-pi/2, pi/2]");
  }
  if (!std::isfinite(view.azimuth) || !std::isfinite(view.elevation) ||
      !std::isfinite(view.distance)) {
    throw InvalidInput("camera view has non-finite fields");
  }
}

Vec3 view_direction(const CameraView& view) {
  double ce = std::cos(view.elevation);
  return {ce * std::sin(view.azimuth), std::sin(view.elevation),
          ce * std::cos(view.azimuth)};
}

ViewSet orthogonal_views() {
  ViewSet set;
  set.kind = ViewSetKind::orthogonal6;
  set.views = {
      {0.0, 0.0, 1.0},            // front
      {M_PI, 0.0, 1.0},           // back
      {M_PI / 2.0, 0.0, 1.0},     // left
      {-M_PI / 2.0, 0.0, 1.0},    // right
      {0.0, M_PI / 2.0, 1.0},     // top
      {0.0, -M_PI / 2.0, 1.0},    // bottom
  };
  return set;
}

ViewSet spherical_views(double corner_elevation) {
  ViewSet set;
  set.views = orthogonal_views().views;
  set.kind = ViewSetKind::spherical10;
  const double corner_az[4] = {M_PI / 4.0, 3.0 * M_PI / 4.0,
                               -3.0 * M_PI / 4.0, -M_PI / 4.0};
  for (double az : corner_az) {
    set.views.push_back({az, corner_elevation, 1.0});
  }
  for (const CameraView& v : set.views) validate(v);
  return set;
}

std::pair<CameraView, CameraView> jitter_distance(const CameraView& view,
                                                  Rng& rng) {
  CameraView a = view;
  CameraView b = view;
  a.distance = rng.uniform(kJitterLow, kJitterHigh);
  b.distance = rng.uniform(kJitterLow, kJitterHigh);
  return {a, b};
}

}  // namespace c2p
