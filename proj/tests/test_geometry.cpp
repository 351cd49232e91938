#include <cmath>

#include "c2p/geometry.hpp"
#include "doctest.h"

using namespace c2p;

namespace {

PointCloud random_cloud(std::size_t n, Rng& rng, double spread = 2.0) {
  PointCloud c;
  for (std::size_t i = 0; i < n; ++i) {
    c.points.push_back({rng.uniform(-spread, spread), rng.uniform(-spread, spread),
                        rng.uniform(-spread, spread)});
  }
  return c;
}

// Reference FPS: recomputes the full distance-to-set minimum per step.
PointCloud reference_fps(const PointCloud& cloud, std::size_t k) {
  std::size_t m = std::min(k, cloud.points.size());
  std::vector<std::size_t> selected{0};
  while (selected.size() < m) {
    std::size_t best = 0;
    double best_d2 = -1.0;
    for (std::size_t i = 0; i < cloud.points.size(); ++i) {
      double d2 = std::numeric_limits<double>::infinity();
      for (std::size_t s : selected) {
        d2 = std::min(d2, (cloud.points[i] - cloud.points[s]).squared_norm());
      }
      if (d2 > best_d2) {
        best_d2 = d2;
        best = i;
      }
    }
    selected.push_back(best);
  }
  PointCloud out;
  out.id = cloud.id;
  for (std::size_t s : selected) out.points.push_back(cloud.points[s]);
  return out;
}

bool same_points(const PointCloud& a, const PointCloud& b) {
  if (a.points.size() != b.points.size()) return false;
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    if (a.points[i].x != b.points[i].x || a.points[i].y != b.points[i].y ||
        a.points[i].z != b.points[i].z) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("normalize on already-normalized and shifted inputs") {
  PointCloud c1{{{1, 0, 0}, {-1, 0, 0}}, "pair"};
  PointCloud r1 = normalize(c1);
  CHECK(r1.points[0].x == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r1.points[1].x == doctest::Approx(-1.0).epsilon(1e-12));

  PointCloud c2{{{2, 0, 0}, {4, 0, 0}}, "shifted"};
  PointCloud r2 = normalize(c2);
  CHECK(r2.points[0].x == doctest::Approx(-1.0));
  CHECK(r2.points[1].x == doctest::Approx(1.0));
}

TEST_CASE("normalize: centroid at origin, max norm one") {
  Rng rng(42);
  PointCloud c = random_cloud(100, rng);
  PointCloud r = normalize(c);
  Vec3 centroid{0, 0, 0};
  double max_norm = 0.0;
  for (const Vec3& p : r.points) {
    centroid = centroid + p;
    max_norm = std::max(max_norm, p.norm());
  }
  centroid = centroid * (1.0 / 100.0);
  CHECK(centroid.norm() < 1e-9);
  CHECK(max_norm == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("normalize degenerate and error cases") {
  PointCloud same{{{3, 3, 3}, {3, 3, 3}}, "dup"};
  PointCloud r = normalize(same);
  for (const Vec3& p : r.points) CHECK(p.norm() == 0.0);

  CHECK_THROWS_AS(normalize(PointCloud{}), InvalidInput);
  PointCloud bad{{{0, 0, std::nan("")}}, "nan"};
  CHECK_THROWS_AS(normalize(bad), InvalidInput);
}

TEST_CASE("normalize is idempotent") {
  Rng rng(7);
  PointCloud c = random_cloud(64, rng);
  PointCloud once = normalize(c);
  PointCloud twice = normalize(once);
  for (std::size_t i = 0; i < once.points.size(); ++i) {
    CHECK((once.points[i] - twice.points[i]).norm() < 1e-9);
  }
}

TEST_CASE("fps trivial cases") {
  PointCloud c{{{0, 0, 0}, {1, 0, 0}, {0.5, 0, 0}}, "line"};
  PointCloud two = farthest_point_sample(c, 2);
  CHECK(two.points.size() == 2);
  CHECK(two.points[0].x == 0.0);
  CHECK(two.points[1].x == 1.0);

  PointCloud one = farthest_point_sample(c, 1);
  CHECK(one.points.size() == 1);
  CHECK(one.points[0].x == 0.0);  // seed rule

  CHECK(farthest_point_sample(c, 99).points.size() == 3);
  CHECK_THROWS_AS(farthest_point_sample(c, 0), InvalidInput);
}

TEST_CASE("fps matches the O(n*k) reference on a large cloud") {
  Rng rng(20240301);
  PointCloud c = random_cloud(2000, rng);
  PointCloud fast = farthest_point_sample(c, 1024);
  PointCloud ref = reference_fps(c, 1024);
  CHECK(same_points(fast, ref));
}

TEST_CASE("fps is idempotent on its own output") {
  Rng rng(9);
  PointCloud c = random_cloud(200, rng);
  PointCloud sub = farthest_point_sample(c, 60);
  PointCloud again = farthest_point_sample(sub, 60);
  CHECK(same_points(sub, again));

  // Crafted ties: grid corners equidistant from the seed.
  PointCloud grid{{{0, 0, 0}, {1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}},
                  "ties"};
  PointCloud picked = farthest_point_sample(grid, 3);
  PointCloud repicked = farthest_point_sample(picked, 3);
  CHECK(same_points(picked, repicked));
  CHECK(picked.points[1].x == 1.0);  // lowest index among the tied corners
}

TEST_CASE("fps output is a subset of the input multiset") {
  Rng rng(13);
  PointCloud c = random_cloud(150, rng);
  PointCloud sub = farthest_point_sample(c, 40);
  for (const Vec3& p : sub.points) {
    bool found = false;
    for (const Vec3& q : c.points) {
      if (p.x == q.x && p.y == q.y && p.z == q.z) {
        found = true;
        break;
      }
    }
    CHECK(found);
  }
}
