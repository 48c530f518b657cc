#pragma once

#include <span>
#include <string>

#include "retarget/spatial_loss.hpp"

namespace retarget {

struct MetricsReport {
  double mse = 0.0;
  double mse_local = 0.0;
  double pen_rate = 0.0;   // percentage
  double curvature = 0.0;
  std::vector<double> per_joint_curvature;  // indexed like the joint list used
};

// Mean squared FK joint-position error over frames and joints, divided by
// the character height.
double mse(const Motion& predicted, const Skeleton& predicted_skeleton, const Motion& ground_truth,
           const Skeleton& ground_truth_skeleton);

// MSE with the global channel of both motions zeroed (root pinned).
double local_mse(const Motion& predicted, const Skeleton& predicted_skeleton,
                 const Motion& ground_truth, const Skeleton& ground_truth_skeleton);

// Percentage of limb vertices (full sets, not subsamples) whose signed depth
// exceeds the threshold, over all frames.
double penetration_rate(const SkinnedCharacter& character, const LimbSegmentation& segmentation,
                        const Motion& motion, double depth_threshold = 0.0,
                        const PenetrationOptions& options = {});

// Mean squared discrete second difference of FK joint trajectories at unit
// frame spacing, averaged over interior frames and the given joints (all
// joints when the list is empty). Per-joint values returned when requested.
double curvature(const Motion& motion, const Skeleton& skeleton,
                 std::span<const int> limb_joints = {},
                 std::vector<double>* per_joint = nullptr);

// Flat key=value lines, one metric per line.
std::string metrics_kv(const MetricsReport& report, double wall_ms);

// Appends "sequence_id,mse,mse_local,pen_rate,curvature,wall_ms"; writes the
// header when the file is new.
void append_metrics_csv(const std::string& path, const std::string& sequence_id,
                        const MetricsReport& report, double wall_ms);

}  // namespace retarget
