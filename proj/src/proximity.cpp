#include "retarget/proximity.hpp"

#include <algorithm>
#include <limits>

namespace retarget {

namespace {

constexpr int kLeafSize = 12;

inline double dist2(const Vec3& a, const Vec3& b) {
  double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
  return dx * dx + dy * dy + dz * dz;
}

inline double coord(const Vec3& v, int axis) { return axis == 0 ? v.x : axis == 1 ? v.y : v.z; }

inline bool better(double d2, int idx, const ProximityIndex::Hit& best) {
  return d2 < best.dist2 || (d2 == best.dist2 && idx < best.index);
}

}  // namespace

ProximityIndex::ProximityIndex(std::vector<Vec3> points, std::vector<Vec3> normals)
    : points_(std::move(points)), normals_(std::move(normals)) {
  if (points_.empty()) throw DomainError("cannot build proximity index over an empty set");
  if (normals_.size() != points_.size()) throw ShapeError("point and normal counts differ");
  for (const Vec3& n : normals_)
    if (std::abs(norm(n) - 1.0) > 1e-6) throw DomainError("proximity index requires unit normals");
  order_.resize(points_.size());
  for (size_t i = 0; i < order_.size(); ++i) order_[i] = static_cast<int>(i);
  nodes_.reserve(2 * points_.size() / kLeafSize + 2);
  root_ = build(0, static_cast<int>(points_.size()));
}

int ProximityIndex::build(int begin, int end) {
  Node node;
  node.begin = begin;
  node.end = end;
  if (end - begin > kLeafSize) {
    Vec3 lo = points_[order_[begin]], hi = lo;
    for (int i = begin + 1; i < end; ++i) {
      const Vec3& p = points_[order_[i]];
      lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
      hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
    }
    Vec3 extent = hi - lo;
    int axis = 0;
    if (extent.y > coord(extent, axis)) axis = 1;
    if (extent.z > coord(extent, axis)) axis = 2;
    if (coord(extent, axis) > 0.0) {
      int mid = (begin + end) / 2;
      std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                       [&](int a, int b) {
                         double ca = coord(points_[a], axis), cb = coord(points_[b], axis);
                         return ca < cb || (ca == cb && a < b);
                       });
      node.axis = axis;
      node.split = coord(points_[order_[mid]], axis);
      int id = static_cast<int>(nodes_.size());
      nodes_.push_back(node);
      int left = build(begin, mid);
      int right = build(mid, end);
      nodes_[id].left = left;
      nodes_[id].right = right;
      return id;
    }
    // All points coincide on every axis; fall through to a leaf.
  }
  int id = static_cast<int>(nodes_.size());
  nodes_.push_back(node);
  return id;
}

void ProximityIndex::search(int node_id, const Vec3& query, Hit& best) const {
  const Node& node = nodes_[node_id];
  if (node.axis < 0) {
    for (int i = node.begin; i < node.end; ++i) {
      int idx = order_[i];
      double d2 = dist2(query, points_[idx]);
      if (better(d2, idx, best)) best = {idx, d2};
    }
    return;
  }
  double delta = coord(query, node.axis) - node.split;
  int near = delta < 0.0 ? node.left : node.right;
  int far = delta < 0.0 ? node.right : node.left;
  search(near, query, best);
  // Non-strict bound so equal-distance points on the far side can still win
  // the lowest-index tie-break.
  if (delta * delta <= best.dist2) search(far, query, best);
}

ProximityIndex::Hit ProximityIndex::nearest(const Vec3& query) const {
  Hit best{-1, std::numeric_limits<double>::infinity()};
  search(root_, query, best);
  return best;
}

SignedDepthResult ProximityIndex::signed_depth(const Vec3& query) const {
  Hit hit = nearest(query);
  SignedDepthResult result;
  result.nearest_index = hit.index;
  result.offset = query - points_[hit.index];
  result.depth = -dot(result.offset, normals_[hit.index]);
  return result;
}

ProximityIndex build_index(std::vector<Vec3> points, std::vector<Vec3> normals) {
  return ProximityIndex(std::move(points), std::move(normals));
}

ProximityIndex::Hit nearest_brute(std::span<const Vec3> points, const Vec3& query) {
  ProximityIndex::Hit best{-1, std::numeric_limits<double>::infinity()};
  for (size_t i = 0; i < points.size(); ++i) {
    double d2 = dist2(query, points[i]);
    if (better(d2, static_cast<int>(i), best)) best = {static_cast<int>(i), d2};
  }
  return best;
}

double chamfer_distance(std::span<const Vec3> set_a, std::span<const Vec3> set_b) {
  if (set_a.empty() || set_b.empty()) throw DomainError("chamfer distance requires nonempty sets");
  std::vector<Vec3> unit_normals_a(set_a.size(), Vec3{0, 0, 1});
  std::vector<Vec3> unit_normals_b(set_b.size(), Vec3{0, 0, 1});
  ProximityIndex index_a(std::vector<Vec3>(set_a.begin(), set_a.end()), std::move(unit_normals_a));
  ProximityIndex index_b(std::vector<Vec3>(set_b.begin(), set_b.end()), std::move(unit_normals_b));
  double sum_ab = 0.0;
  for (const Vec3& p : set_a) sum_ab += index_b.nearest(p).dist2;
  double sum_ba = 0.0;
  for (const Vec3& p : set_b) sum_ba += index_a.nearest(p).dist2;
  return 0.5 * (sum_ab / set_a.size() + sum_ba / set_b.size());
}

}  // namespace retarget
