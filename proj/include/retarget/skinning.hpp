#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "retarget/skeleton.hpp"

namespace retarget {

struct SkinInfluence {
  int joint = -1;
  double weight = 0.0;
};

// The four limbs, in this fixed order.
enum Limb : int { kRightArm = 0, kLeftArm = 1, kRightLeg = 2, kLeftLeg = 3 };
constexpr int kLimbCount = 4;
extern const char* const kLimbNames[kLimbCount];

// Joint index sets defining each limb plus the joints whose dominated
// vertices are excluded from penetration terms (upper-arm/upper-leg bands).
struct LimbConfig {
  std::array<std::vector<int>, kLimbCount> limb_joints;
  std::vector<int> excluded_joints;
};

struct SkinnedCharacter {
  std::vector<Vec3> vertices;  // rest pose
  std::vector<Vec3> normals;   // rest pose, unit, outward
  std::vector<std::array<int, 3>> faces;
  std::vector<std::vector<SkinInfluence>> weights;  // <= 4 influences per vertex
  Skeleton skeleton;
  LimbConfig limbs;

  int vertex_count() const { return static_cast<int>(vertices.size()); }

  // Validates invariants and caches rest-pose joint positions.
  void finalize();
  const std::vector<Vec3>& bind_positions() const { return bind_positions_; }

 private:
  std::vector<Vec3> bind_positions_;
};

// Vertex index sets per limb, their reference sets (all non-excluded
// vertices outside the limb), and the excluded band.
struct LimbSegmentation {
  std::array<std::vector<int>, kLimbCount> limb_vertices;
  std::array<std::vector<int>, kLimbCount> reference_vertices;
  std::vector<int> excluded_vertices;
};

struct DeformedGeometry {
  std::vector<Vec3> positions;
  std::vector<Vec3> normals;
};

// Linear blend skinning of the full mesh at one frame. Vertex positions are
// weighted sums of per-joint rigid transforms; normals are rotated by the
// blended rotation and renormalized.
DeformedGeometry lbs_deform(const SkinnedCharacter& character, const Motion& motion, int frame);

// Deforms only the vertices named by `indices` under a precomputed pose.
// `out_normals` may be empty to skip normal deformation.
void lbs_deform_points(const SkinnedCharacter& character, const Pose& pose,
                       std::span<const int> indices, std::span<Vec3> out_positions,
                       std::span<Vec3> out_normals);

// Assigns each vertex to the limb owning its dominant skinning joint;
// excluded joints take precedence over limb membership.
LimbSegmentation segment_limbs(const SkinnedCharacter& character, const LimbConfig& config);

struct SampleCounts {
  int shape = 1024;
  int limb_query = 400;
  int limb_reference = 4000;
};

struct DrawnSet {
  std::vector<int> indices;        // ascending when drawn without replacement
  bool with_replacement = false;   // set when the request exceeded the pool
};

struct PointSample {
  DrawnSet shape;
  std::vector<Vec3> shape_positions;  // rest-pose copies of the shape draw
  std::vector<Vec3> shape_normals;
  std::array<DrawnSet, kLimbCount> limb_query;
  std::array<DrawnSet, kLimbCount> limb_reference;
  std::uint64_t seed = 0;
};

// Uniform sampling without replacement, reproducible from the seed. Draws
// the shape set from all vertices and query/reference sets per limb.
PointSample sample_points(const SkinnedCharacter& character, const LimbSegmentation& segmentation,
                          const SampleCounts& counts, std::uint64_t seed);

// Single seeded draw from [0, pool_size); exposed for reuse and testing.
DrawnSet sample_indices(std::span<const int> pool, int count, std::uint64_t seed);

}  // namespace retarget
