#pragma once

#include <utility>
#include <vector>

#include "c2p/common.hpp"

namespace c2p {

// One projection: direction given as azimuth/elevation (radians), camera at
// `distance` from the origin looking at it. Axis convention is right-handed
// with Y up; azimuth 0 / elevation 0 places the camera on +Z looking -Z.
struct CameraView {
  double azimuth = 0.0;
  double elevation = 0.0;
  double distance = 1.0;
};

void validate(const CameraView& view);  // distance > 0, |elevation| <= pi/2

enum class ViewSetKind { orthogonal6, spherical10 };

struct ViewSet {
  std::vector<CameraView> views;
  ViewSetKind kind = ViewSetKind::orthogonal6;
};

inline constexpr double kDefaultCornerElevation = M_PI / 6.0;
inline constexpr double kJitterLow = 0.9;
inline constexpr double kJitterHigh = 1.1;

// front, back, left, right, top, bottom; all at distance 1.
ViewSet orthogonal_views();

// The 6 orthogonal views followed by 4 corner views at azimuths
// {pi/4, 3pi/4, -3pi/4, -pi/4}. Corner elevation is a config default.
ViewSet spherical_views(double corner_elevation = kDefaultCornerElevation);

// Two copies of `view` with independent distances drawn uniformly from
// [0.9, 1.1); consumes exactly two draws from rng. Angles are preserved.
std::pair<CameraView, CameraView> jitter_distance(const CameraView& view,
                                                  Rng& rng);

// Unit vector from origin toward the camera position for this view.
Vec3 view_direction(const CameraView& view);

}  // namespace c2p
