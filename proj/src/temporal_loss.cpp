#include "retarget/temporal_loss.hpp"

#include <algorithm>
#include <cmath>

namespace retarget {

namespace {
constexpr double kDegenerateExtent = 1e-12;
}

double trajectory_extent(std::span<const Vec3> positions) {
  Vec3 lo = positions[0], hi = positions[0];
  for (const Vec3& p : positions) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
  }
  Vec3 extent = hi - lo;
  return std::max({extent.x, extent.y, extent.z});
}

double temporal_degenerate_floor(double body_extent) { return 0.01 * body_extent; }

NormalizedTrajectory normalize_trajectory(std::span<const Vec3> positions, double degenerate_floor) {
  if (positions.size() < 2) throw ShapeError("trajectory needs at least two frames");
  for (const Vec3& p : positions)
    if (!finite(p)) throw NumericError("non-finite trajectory position");

  Vec3 lo = positions[0], hi = positions[0];
  for (const Vec3& p : positions) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
  }
  Vec3 extent = hi - lo;
  double scale = std::max({extent.x, extent.y, extent.z});

  NormalizedTrajectory out;
  out.offset = lo;
  if (scale <= std::max(kDegenerateExtent, degenerate_floor)) {
    out.degenerate = true;
    out.scale = 1.0;
    out.points.assign(positions.size(), Vec3{});
    return out;
  }
  out.scale = scale;
  out.points.reserve(positions.size());
  for (const Vec3& p : positions) out.points.push_back((p - lo) / scale);
  return out;
}

MotionMatrix motion_matrix(const NormalizedTrajectory& trajectory) {
  MotionMatrix m;
  m.frames = static_cast<int>(trajectory.points.size());
  m.vectors.resize(static_cast<size_t>(m.frames) * m.frames);
  for (int i = 0; i < m.frames; ++i)
    for (int j = 0; j < m.frames; ++j)
      m.vectors[static_cast<size_t>(i) * m.frames + j] = trajectory.points[j] - trajectory.points[i];
  return m;
}

std::vector<int> pair_frames(int frame_count, int cap) {
  std::vector<int> frames;
  int stride = frame_count > cap ? (frame_count + cap - 1) / cap : 1;
  for (int t = 0; t < frame_count; t += stride) frames.push_back(t);
  return frames;
}

double temporal_consistency_from_positions(std::span<const Vec3> trajectory_a,
                                           std::span<const Vec3> trajectory_b,
                                           std::span<const int> frames,
                                           double degenerate_floor_a,
                                           double degenerate_floor_b) {
  NormalizedTrajectory a = normalize_trajectory(trajectory_a, degenerate_floor_a);
  NormalizedTrajectory b = normalize_trajectory(trajectory_b, degenerate_floor_b);
  double sum = 0.0;
  for (int i : frames)
    for (int j : frames) {
      Vec3 diff = (b.points[j] - b.points[i]) - (a.points[j] - a.points[i]);
      sum += norm2(diff);
    }
  double pairs = static_cast<double>(frames.size()) * static_cast<double>(frames.size());
  return sum / pairs;
}

double temporal_consistency_loss(const Motion& motion_a, const Skeleton& skeleton_a,
                                 const Motion& motion_b, const Skeleton& skeleton_b) {
  if (motion_a.frame_count != motion_b.frame_count || motion_a.joint_count != motion_b.joint_count)
    throw ShapeError("temporal consistency loss requires equal T and K");
  int t_count = motion_a.frame_count;
  int k_count = motion_a.joint_count;
  if (t_count < 2) throw ShapeError("temporal consistency loss needs at least two frames");

  std::vector<Vec3> pos_a(static_cast<size_t>(t_count) * k_count);
  std::vector<Vec3> pos_b(static_cast<size_t>(t_count) * k_count);
  for (int t = 0; t < t_count; ++t) {
    Pose pa = forward_kinematics(skeleton_a, motion_a, t);
    Pose pb = forward_kinematics(skeleton_b, motion_b, t);
    for (int k = 0; k < k_count; ++k) {
      pos_a[static_cast<size_t>(t) * k_count + k] = pa.positions[k];
      pos_b[static_cast<size_t>(t) * k_count + k] = pb.positions[k];
    }
  }

  std::vector<int> frames = pair_frames(t_count);
  std::vector<Vec3> traj_a(t_count), traj_b(t_count);
  // Whole-body extents set the per-joint degeneracy floors.
  double body_a = 0.0, body_b = 0.0;
  for (int k = 0; k < k_count; ++k) {
    for (int t = 0; t < t_count; ++t) {
      traj_a[t] = pos_a[static_cast<size_t>(t) * k_count + k];
      traj_b[t] = pos_b[static_cast<size_t>(t) * k_count + k];
    }
    body_a = std::max(body_a, trajectory_extent(traj_a));
    body_b = std::max(body_b, trajectory_extent(traj_b));
  }
  double floor_a = temporal_degenerate_floor(body_a);
  double floor_b = temporal_degenerate_floor(body_b);
  double sum = 0.0;
  for (int k = 0; k < k_count; ++k) {
    for (int t = 0; t < t_count; ++t) {
      traj_a[t] = pos_a[static_cast<size_t>(t) * k_count + k];
      traj_b[t] = pos_b[static_cast<size_t>(t) * k_count + k];
    }
    sum += temporal_consistency_from_positions(traj_a, traj_b, frames, floor_a, floor_b);
  }
  return sum / k_count;
}

double basic_smoothness_loss(const Motion& motion, const Skeleton& skeleton) {
  if (motion.frame_count < 2) throw ShapeError("smoothness loss needs at least two frames");
  int k_count = skeleton.size();
  double sum = 0.0;
  Pose prev = forward_kinematics(skeleton, motion, 0);
  for (int t = 1; t < motion.frame_count; ++t) {
    Pose cur = forward_kinematics(skeleton, motion, t);
    for (int k = 0; k < k_count; ++k) sum += norm2(cur.positions[k] - prev.positions[k]);
    prev = std::move(cur);
  }
  return sum / (static_cast<double>(motion.frame_count - 1) * k_count);
}

}  // namespace retarget
