#include <cmath>

#include "c2p/views.hpp"
#include "doctest.h"

using namespace c2p;

TEST_CASE("orthogonal views: six views at distance one, axes orthogonal") {
  ViewSet set = orthogonal_views();
  REQUIRE(set.views.size() == 6);
  CHECK(set.kind == ViewSetKind::orthogonal6);
  for (const CameraView& v : set.views) CHECK(v.distance == 1.0);

  // Front view direction is +Z, so the camera looks along -Z at the origin.
  Vec3 front = view_direction(set.views[0]);
  CHECK(front.x == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(front.y == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(front.z == doctest::Approx(1.0));

  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = i + 1; j < 6; ++j) {
      double d = view_direction(set.views[i]).dot(view_direction(set.views[j]));
      bool ortho_or_opposite =
          std::abs(d) < 1e-12 || std::abs(d + 1.0) < 1e-12;
      CHECK(ortho_or_opposite);
    }
  }
}

TEST_CASE("spherical views extend the orthogonal six") {
  ViewSet sph = spherical_views();
  REQUIRE(sph.views.size() == 10);
  CHECK(sph.kind == ViewSetKind::spherical10);
  ViewSet orth = orthogonal_views();
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(sph.views[i].azimuth == orth.views[i].azimuth);
    CHECK(sph.views[i].elevation == orth.views[i].elevation);
  }
  for (const CameraView& v : sph.views) CHECK(v.distance == 1.0);
  for (std::size_t i = 6; i < 10; ++i) {
    CHECK(sph.views[i].elevation == doctest::Approx(M_PI / 6.0));
  }
  CHECK(sph.views[6].azimuth == doctest::Approx(M_PI / 4.0));
  CHECK(sph.views[7].azimuth == doctest::Approx(3.0 * M_PI / 4.0));
  CHECK(sph.views[8].azimuth == doctest::Approx(-3.0 * M_PI / 4.0));
  CHECK(sph.views[9].azimuth == doctest::Approx(-M_PI / 4.0));

  // Corner elevation is a config default, overridable.
  ViewSet flat = spherical_views(0.0);
  CHECK(flat.views[6].elevation == 0.0);
}

TEST_CASE("jitter keeps angles and stays inside [0.9, 1.1)") {
  CameraView v{0.4, -0.2, 1.0};
  Rng rng(99);
  for (int i = 0; i < 2000; ++i) {
    auto [a, b] = jitter_distance(v, rng);
    CHECK(a.azimuth == v.azimuth);
    CHECK(a.elevation == v.elevation);
    CHECK(b.azimuth == v.azimuth);
    CHECK(b.elevation == v.elevation);
    CHECK(a.distance >= kJitterLow);
    CHECK(a.distance < kJitterHigh);
    CHECK(b.distance >= kJitterLow);
    CHECK(b.distance < kJitterHigh);
  }
}

TEST_CASE("jitter is deterministic and consumes exactly two draws") {
  CameraView v{1.0, 0.5, 1.0};
  Rng r1(42), r2(42);
  auto [a1, b1] = jitter_distance(v, r1);
  auto [a2, b2] = jitter_distance(v, r2);
  CHECK(a1.distance == a2.distance);
  CHECK(b1.distance == b2.distance);

  // Two draws consumed: the streams stay aligned afterwards.
  CHECK(r1.next_u64() == r2.next_u64());

  Rng r3(42);
  double first = r3.uniform(kJitterLow, kJitterHigh);
  double second = r3.uniform(kJitterLow, kJitterHigh);
  CHECK(a1.distance == first);
  CHECK(b1.distance == second);
}

TEST_CASE("view validation") {
  CHECK_THROWS_AS(validate(CameraView{0, 0, 0.0}), InvalidInput);
  CHECK_THROWS_AS(validate(CameraView{0, 2.0, 1.0}), InvalidInput);
}
