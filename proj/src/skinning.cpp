#include "retarget/skinning.hpp"

#include <algorithm>
#include <random>

namespace retarget {

const char* const kLimbNames[kLimbCount] = {"right_arm", "left_arm", "right_leg", "left_leg"};

void SkinnedCharacter::finalize() {
  skeleton.validate();
  if (normals.size() != vertices.size()) throw ShapeError("vertex and normal counts differ");
  if (weights.size() != vertices.size()) throw ShapeError("vertex and weight-row counts differ");
  for (size_t i = 0; i < weights.size(); ++i) {
    const auto& row = weights[i];
    if (row.empty() || row.size() > 4)
      throw DomainError("vertex " + std::to_string(i) + " must have 1..4 influences");
    double sum = 0.0;
    for (const SkinInfluence& inf : row) {
      if (inf.joint < 0 || inf.joint >= skeleton.size())
        throw ShapeError("skin influence joint index out of range");
      if (inf.weight < 0.0) throw DomainError("negative skin weight");
      sum += inf.weight;
    }
    if (std::abs(sum - 1.0) > 1e-6)
      throw DomainError("skin weights of vertex " + std::to_string(i) + " do not sum to 1");
  }
  for (const Vec3& n : normals)
    if (std::abs(norm(n) - 1.0) > 1e-6) throw DomainError("non-unit rest normal");
  for (const auto& f : faces)
    for (int idx : f)
      if (idx < 0 || idx >= vertex_count()) throw ShapeError("face vertex index out of range");
  bind_positions_ = skeleton.bind_positions();
}

void lbs_deform_points(const SkinnedCharacter& character, const Pose& pose,
                       std::span<const int> indices, std::span<Vec3> out_positions,
                       std::span<Vec3> out_normals) {
  const auto& bind = character.bind_positions();
  bool want_normals = !out_normals.empty();
  for (size_t i = 0; i < indices.size(); ++i) {
    int v = indices[i];
    Vec3 p{};
    Vec3 n{};
    for (const SkinInfluence& inf : character.weights[v]) {
      const Quat& r = pose.world_rotations[inf.joint];
      p += inf.weight * (rotate_vec(r, character.vertices[v] - bind[inf.joint]) + pose.positions[inf.joint]);
      if (want_normals) n += inf.weight * rotate_vec(r, character.normals[v]);
    }
    out_positions[i] = p;
    if (want_normals) out_normals[i] = normalize3(n);
  }
}

DeformedGeometry lbs_deform(const SkinnedCharacter& character, const Motion& motion, int frame) {
  Pose pose = forward_kinematics(character.skeleton, motion, frame);
  DeformedGeometry out;
  out.positions.resize(character.vertex_count());
  out.normals.resize(character.vertex_count());
  std::vector<int> all(character.vertex_count());
  for (int i = 0; i < character.vertex_count(); ++i) all[i] = i;
  lbs_deform_points(character, pose, all, out.positions, out.normals);
  return out;
}

namespace {

int dominant_joint(const std::vector<SkinInfluence>& row) {
  int best = row[0].joint;
  double best_w = row[0].weight;
  for (const SkinInfluence& inf : row) {
    if (inf.weight > best_w || (inf.weight == best_w && inf.joint < best)) {
      best = inf.joint;
      best_w = inf.weight;
    }
  }
  return best;
}

}  // namespace

LimbSegmentation segment_limbs(const SkinnedCharacter& character, const LimbConfig& config) {
  for (int a = 0; a < kLimbCount; ++a)
    for (int b = a + 1; b < kLimbCount; ++b)
      for (int j : config.limb_joints[a])
        if (std::count(config.limb_joints[b].begin(), config.limb_joints[b].end(), j))
          throw DomainError("limb joint sets are not disjoint");

  LimbSegmentation seg;
  std::vector<int> limb_of_vertex(character.vertex_count(), -1);  // -2 = excluded
  for (int v = 0; v < character.vertex_count(); ++v) {
    int joint = dominant_joint(character.weights[v]);
    if (std::count(config.excluded_joints.begin(), config.excluded_joints.end(), joint)) {
      seg.excluded_vertices.push_back(v);
      limb_of_vertex[v] = -2;
      continue;
    }
    for (int l = 0; l < kLimbCount; ++l) {
      if (std::count(config.limb_joints[l].begin(), config.limb_joints[l].end(), joint)) {
        seg.limb_vertices[l].push_back(v);
        limb_of_vertex[v] = l;
        break;
      }
    }
  }
  for (int l = 0; l < kLimbCount; ++l) {
    if (seg.limb_vertices[l].empty())
      throw DomainError(std::string("limb '") + kLimbNames[l] + "' has no vertices after segmentation");
    for (int v = 0; v < character.vertex_count(); ++v)
      if (limb_of_vertex[v] != -2 && limb_of_vertex[v] != l) seg.reference_vertices[l].push_back(v);
  }
  return seg;
}

namespace {

// Bounded draw on top of mt19937_64; the standard distributions are not
// bit-stable across implementations, this is.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    std::uint64_t r = rng();
    if (r >= threshold) return r % bound;
  }
}

}  // namespace

DrawnSet sample_indices(std::span<const int> pool, int count, std::uint64_t seed) {
  if (pool.empty()) throw DomainError("cannot sample from an empty vertex set");
  if (count <= 0) throw DomainError("sample count must be positive");
  DrawnSet out;
  std::mt19937_64 rng(seed);
  if (count >= static_cast<int>(pool.size())) {
    out.indices.assign(pool.begin(), pool.end());
    std::sort(out.indices.begin(), out.indices.end());
    if (count > static_cast<int>(pool.size())) {
      out.with_replacement = true;
      int extra = count - static_cast<int>(pool.size());
      for (int i = 0; i < extra; ++i)
        out.indices.push_back(pool[bounded(rng, pool.size())]);
    }
    return out;
  }
  // Partial Fisher-Yates over a scratch copy.
  std::vector<int> scratch(pool.begin(), pool.end());
  for (int i = 0; i < count; ++i) {
    size_t j = i + bounded(rng, scratch.size() - i);
    std::swap(scratch[i], scratch[j]);
  }
  out.indices.assign(scratch.begin(), scratch.begin() + count);
  std::sort(out.indices.begin(), out.indices.end());
  return out;
}

PointSample sample_points(const SkinnedCharacter& character, const LimbSegmentation& segmentation,
                          const SampleCounts& counts, std::uint64_t seed) {
  PointSample sample;
  sample.seed = seed;
  std::vector<int> all(character.vertex_count());
  for (int i = 0; i < character.vertex_count(); ++i) all[i] = i;
  sample.shape = sample_indices(all, counts.shape, seed);
  sample.shape_positions.reserve(sample.shape.indices.size());
  sample.shape_normals.reserve(sample.shape.indices.size());
  for (int v : sample.shape.indices) {
    sample.shape_positions.push_back(character.vertices[v]);
    sample.shape_normals.push_back(character.normals[v]);
  }
  for (int l = 0; l < kLimbCount; ++l) {
    sample.limb_query[l] =
        sample_indices(segmentation.limb_vertices[l], counts.limb_query, seed + 0x9e3779b97f4a7c15ull * (l + 1));
    sample.limb_reference[l] = sample_indices(segmentation.reference_vertices[l], counts.limb_reference,
                                              seed + 0xbf58476d1ce4e5b9ull * (l + 1));
  }
  return sample;
}

}  // namespace retarget
