#pragma once

#include <span>
#include <vector>

#include "retarget/core_math.hpp"

namespace retarget {

struct SignedDepthResult {
  int nearest_index = -1;
  Vec3 offset;          // query - nearest reference point
  double depth = 0.0;   // positive when the query lies inside the surface
};

// Exact nearest-neighbor index over reference points with outward unit
// normals. Queries match a brute-force scan bit for bit; ties in distance
// resolve to the lowest point index.
class ProximityIndex {
 public:
  ProximityIndex() = default;
  ProximityIndex(std::vector<Vec3> points, std::vector<Vec3> normals);

  int size() const { return static_cast<int>(points_.size()); }
  const Vec3& point(int i) const { return points_[i]; }
  const Vec3& normal(int i) const { return normals_[i]; }

  struct Hit {
    int index = -1;
    double dist2 = 0.0;
  };
  Hit nearest(const Vec3& query) const;

  // phi = -(query - nearest) . nearest_normal, positive inside.
  SignedDepthResult signed_depth(const Vec3& query) const;

 private:
  struct Node {
    int axis = -1;        // -1 marks a leaf
    double split = 0.0;
    int left = -1, right = -1;
    int begin = 0, end = 0;  // leaf range into order_
  };

  int build(int begin, int end);
  void search(int node, const Vec3& query, Hit& best) const;

  std::vector<Vec3> points_;
  std::vector<Vec3> normals_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

ProximityIndex build_index(std::vector<Vec3> points, std::vector<Vec3> normals);

// Linear-scan nearest neighbor with the same comparison rule as the index.
ProximityIndex::Hit nearest_brute(std::span<const Vec3> points, const Vec3& query);

// Symmetric mean of squared nearest-neighbor distances in both directions.
double chamfer_distance(std::span<const Vec3> set_a, std::span<const Vec3> set_b);

}  // namespace retarget
