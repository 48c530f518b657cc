#pragma once

#include <span>
#include <vector>

#include "retarget/skeleton.hpp"

namespace retarget {

struct NormalizedTrajectory {
  std::vector<Vec3> points;   // inside the unit cube
  Vec3 offset;                // per-axis minimum that was subtracted
  double scale = 1.0;         // single uniform divisor (largest axis extent)
  bool degenerate = false;    // near-zero extent; points are all zero
};

// Per-joint T x T grid of motion vectors m[i][j] = c_j - c_i.
struct MotionMatrix {
  int frames = 0;
  std::vector<Vec3> vectors;  // [i * frames + j]

  const Vec3& at(int i, int j) const { return vectors[static_cast<size_t>(i) * frames + j]; }
};

// Translates to the origin and divides all axes by the largest axis extent,
// preserving aspect ratio. Trajectories whose extent falls below the floor
// (or below 1e-12 absolute) map to the zero trajectory.
NormalizedTrajectory normalize_trajectory(std::span<const Vec3> positions,
                                          double degenerate_floor = 0.0);

// Largest axis extent of a trajectory's bounding box.
double trajectory_extent(std::span<const Vec3> positions);

// Per-joint degeneracy floor used by the temporal loss: 1% of the motion's
// whole-body trajectory extent. Joints moving less than this carry no usable
// trajectory shape, and self-normalization would amplify noise instead.
double temporal_degenerate_floor(double body_extent);

MotionMatrix motion_matrix(const NormalizedTrajectory& trajectory);

// Strided frame subset used for pairwise terms; identity below the cap.
std::vector<int> pair_frames(int frame_count, int cap = 256);

// Mean squared difference of the two motion matrices built from one joint's
// self-normalized trajectories, over the given frame subset.
double temporal_consistency_from_positions(std::span<const Vec3> trajectory_a,
                                           std::span<const Vec3> trajectory_b,
                                           std::span<const int> frames,
                                           double degenerate_floor_a = 0.0,
                                           double degenerate_floor_b = 0.0);

// Multi-level temporal consistency: FK both motions, self-normalize each
// joint trajectory, compare pairwise motion matrices, average over joints.
double temporal_consistency_loss(const Motion& motion_a, const Skeleton& skeleton_a,
                                 const Motion& motion_b, const Skeleton& skeleton_b);

// Mean squared difference of consecutive-frame FK joint positions.
double basic_smoothness_loss(const Motion& motion, const Skeleton& skeleton);

}  // namespace retarget
