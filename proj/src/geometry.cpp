#include "c2p/geometry.hpp"

#include <algorithm>
#include <limits>

namespace c2p {

void validate(const PointCloud& cloud) {
  if (cloud.points.empty()) {
    throw InvalidInput("point cloud '" + cloud.id + "' is empty");
  }
  for (const Vec3& p : cloud.points) {
    if (!p.finite()) {
      throw InvalidInput("point cloud '" + cloud.id +
                         "' contains non-finite coordinates");
    }
  }
}

PointCloud normalize(const PointCloud& cloud) {
  validate(cloud);
  Vec3 centroid{0.0, 0.0, 0.0};
  for (const Vec3& p : cloud.points) centroid = centroid + p;
  double inv_n = 1.0 / static_cast<double>(cloud.points.size());
  centroid = centroid * inv_n;

  PointCloud out;
  out.id = cloud.id;
  out.points.reserve(cloud.points.size());
  double max_norm = 0.0;
  for (const Vec3& p : cloud.points) {
    Vec3 q = p - centroid;
    out.points.push_back(q);
    max_norm = std::max(max_norm, q.norm());
  }
  if (max_norm > 0.0) {
    double s = 1.0 / max_norm;
    for (Vec3& q : out.points) q = q * s;
  }
  return out;
}

PointCloud farthest_point_sample(const PointCloud& cloud, std::size_t k) {
  validate(cloud);
  if (k < 1) throw InvalidInput("farthest_point_sample requires k >= 1");
  std::size_t n = cloud.points.size();
  std::size_t m = std::min(k, n);

  PointCloud out;
  out.id = cloud.id;
  out.points.reserve(m);

  // min squared distance from each point to the selected set
  std::vector<double> min_d2(n, std::numeric_limits<double>::infinity());
  std::size_t current = 0;  // seed
  out.points.push_back(cloud.points[0]);

  for (std::size_t step = 1; step < m; ++step) {
    const Vec3& last = cloud.points[current];
    std::size_t best = 0;
    double best_d2 = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      double d2 = (cloud.points[i] - last).squared_norm();
      if (d2 < min_d2[i]) min_d2[i] = d2;
      if (min_d2[i] > best_d2) {  // strict > keeps the lowest index on ties
        best_d2 = min_d2[i];
        best = i;
      }
    }
    current = best;
    out.points.push_back(cloud.points[best]);
  }
  return out;
}

}  // namespace c2p
