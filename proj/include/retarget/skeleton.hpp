#pragma once

#include <array>
#include <string>
#include <vector>

#include "retarget/core_math.hpp"

namespace retarget {

struct Joint {
  std::string name;
  int parent = -1;  // -1 marks the root
  Vec3 offset;      // rest offset from the parent, model units
};

// Topologically sorted joint hierarchy (parent index < child index).
struct Skeleton {
  std::vector<Joint> joints;

  int size() const { return static_cast<int>(joints.size()); }
  int find(const std::string& name) const;  // -1 when absent

  // Throws on multiple roots, out-of-order parents, or non-finite offsets.
  void validate() const;

  // Rest-pose world joint positions (identity rotations, zero global).
  std::vector<Vec3> bind_positions() const;
};

// Per-frame local joint rotations plus the root's global channel.
struct Motion {
  int frame_count = 0;
  int joint_count = 0;
  std::vector<Quat> rotations;                // [t * joint_count + k], unit
  std::vector<std::array<double, 4>> global;  // per frame: x, y, z, reserved
  double frame_rate = 30.0;

  const Quat& rot(int t, int k) const { return rotations[static_cast<size_t>(t) * joint_count + k]; }
  Quat& rot(int t, int k) { return rotations[static_cast<size_t>(t) * joint_count + k]; }

  void validate() const;
};

struct Pose {
  std::vector<Vec3> positions;       // world joint positions
  std::vector<Quat> world_rotations; // world-frame rotations
};

// One unit vector bound to each joint's local frame; shared across characters.
struct JointOrientationField {
  std::vector<Vec3> vectors;

  static JointOrientationField uniform(int joint_count, const Vec3& v = {0.0, 0.0, 1.0});
};

// World pose at one frame. Joint k's world rotation is parent world rotation
// composed with the local rotation; its position is the parent position plus
// the parent world rotation applied to the rest offset. The root position is
// the frame's global translation.
Pose forward_kinematics(const Skeleton& skeleton, const Motion& motion, int frame);

// Vertical extent of the rest-pose joint cloud; must be strictly positive.
double character_height(const Skeleton& skeleton);

// The bound vector of each joint rotated by its world rotation, for every
// frame; result is frame-major [t * K + k].
std::vector<Vec3> propagate_orientation_field(const Skeleton& skeleton, const Motion& motion,
                                              const JointOrientationField& field);

}  // namespace retarget
