#pragma once

#include <string>
#include <string_view>

#include "retarget/skeleton.hpp"

namespace retarget {

struct BvhData {
  Skeleton skeleton;
  Motion motion;
};

// Parses the HIERARCHY/MOTION grammar. Euler channels are converted to
// quaternions honoring each joint's declared channel order; root translation
// fills the global channel. Malformed input raises ParseError with a line
// number. End Site blocks are consumed but not kept as joints.
BvhData parse_bvh(std::string_view text);

// Writer convention: LF line endings, 6-decimal fixed channels, joints emit
// Zrotation Xrotation Yrotation, the root is prefixed with the position
// triple. Round trips with parse_bvh are stable to 1e-6 per channel.
std::string write_bvh(const Skeleton& skeleton, const Motion& motion);

// Euler helpers shared with the writer; angles in radians.
Quat quat_from_axis_angle(int axis, double radians);
void quat_to_zxy(const Quat& q, double& z_radians, double& x_radians, double& y_radians);

}  // namespace retarget
