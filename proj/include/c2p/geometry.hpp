#pragma once

#include <string>
#include <vector>

#include "c2p/common.hpp"

namespace c2p {

// Ordered point set in model units. The renderer's sole geometric input.
struct PointCloud {
  std::vector<Vec3> points;
  std::string id;

  std::size_t size() const { return points.size(); }
};

// Throws InvalidInput if the cloud is empty or contains non-finite values.
void validate(const PointCloud& cloud);

// Centers the cloud on its centroid and scales so the furthest point sits
// at distance 1. All-identical clouds collapse to the origin (scale left 1).
PointCloud normalize(const PointCloud& cloud);

// Greedy farthest-point sampling. Seed is index 0; each step adds the point
// with maximum distance to the selected set, ties broken by lowest original
// index. Returns min(k, |cloud|) points in selection order.
PointCloud farthest_point_sample(const PointCloud& cloud, std::size_t k);

}  // namespace c2p
