#include "retarget/skeleton.hpp"

#include <algorithm>

namespace retarget {

int Skeleton::find(const std::string& name) const {
  for (int i = 0; i < size(); ++i)
    if (joints[i].name == name) return i;
  return -1;
}

void Skeleton::validate() const {
  if (joints.empty()) throw DomainError("skeleton has no joints");
  int roots = 0;
  for (int i = 0; i < size(); ++i) {
    const Joint& j = joints[i];
    if (j.parent < 0) {
      ++roots;
    } else if (j.parent >= i) {
      throw DomainError("skeleton joints are not topologically sorted at '" + j.name + "'");
    }
    if (!finite(j.offset)) throw NumericError("non-finite offset at joint '" + j.name + "'");
  }
  if (roots != 1) throw DomainError("skeleton must have exactly one root");
}

std::vector<Vec3> Skeleton::bind_positions() const {
  std::vector<Vec3> pos(joints.size());
  for (int k = 0; k < size(); ++k) {
    const Joint& j = joints[k];
    pos[k] = j.parent < 0 ? Vec3{} : pos[j.parent] + j.offset;
  }
  return pos;
}

void Motion::validate() const {
  if (frame_count < 0 || joint_count <= 0) throw ShapeError("motion has invalid dimensions");
  if (rotations.size() != static_cast<size_t>(frame_count) * joint_count)
    throw ShapeError("motion rotation grid size mismatch");
  if (global.size() != static_cast<size_t>(frame_count))
    throw ShapeError("motion global grid size mismatch");
  for (const Quat& q : rotations) {
    if (!finite(q)) throw NumericError("non-finite rotation in motion");
    if (std::abs(qnorm(q) - 1.0) > 1e-6) throw DomainError("non-unit rotation in motion");
  }
  for (const auto& d : global)
    for (double v : d)
      if (!std::isfinite(v)) throw NumericError("non-finite global channel in motion");
}

JointOrientationField JointOrientationField::uniform(int joint_count, const Vec3& v) {
  JointOrientationField f;
  f.vectors.assign(joint_count, normalize3(v));
  return f;
}

Pose forward_kinematics(const Skeleton& skeleton, const Motion& motion, int frame) {
  int k_count = skeleton.size();
  if (k_count != motion.joint_count) throw ShapeError("skeleton and motion joint counts differ");
  if (frame < 0 || frame >= motion.frame_count) throw DomainError("frame index out of range");

  Pose pose;
  pose.positions.resize(k_count);
  pose.world_rotations.resize(k_count);
  const auto& d = motion.global[frame];
  for (int k = 0; k < k_count; ++k) {
    int parent = skeleton.joints[k].parent;
    if (parent < 0) {
      pose.world_rotations[k] = motion.rot(frame, k);
      pose.positions[k] = {d[0], d[1], d[2]};
    } else {
      pose.world_rotations[k] = qmul_raw(pose.world_rotations[parent], motion.rot(frame, k));
      pose.positions[k] =
          pose.positions[parent] + rotate_vec(pose.world_rotations[parent], skeleton.joints[k].offset);
    }
  }
  return pose;
}

double character_height(const Skeleton& skeleton) {
  skeleton.validate();
  std::vector<Vec3> pos = skeleton.bind_positions();
  auto [lo, hi] = std::minmax_element(pos.begin(), pos.end(),
                                      [](const Vec3& a, const Vec3& b) { return a.y < b.y; });
  double h = hi->y - lo->y;
  if (h <= 1e-12) throw DomainError("degenerate skeleton: zero vertical extent");
  return h;
}

std::vector<Vec3> propagate_orientation_field(const Skeleton& skeleton, const Motion& motion,
                                              const JointOrientationField& field) {
  int k_count = skeleton.size();
  if (static_cast<int>(field.vectors.size()) != k_count)
    throw ShapeError("orientation field size does not match joint count");
  std::vector<Vec3> out(static_cast<size_t>(motion.frame_count) * k_count);
  for (int t = 0; t < motion.frame_count; ++t) {
    Pose pose = forward_kinematics(skeleton, motion, t);
    for (int k = 0; k < k_count; ++k)
      out[static_cast<size_t>(t) * k_count + k] = rotate_vec(pose.world_rotations[k], field.vectors[k]);
  }
  return out;
}

}  // namespace retarget
