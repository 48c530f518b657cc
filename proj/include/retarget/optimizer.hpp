#pragma once

#include <cstdint>
#include <vector>

#include "retarget/semantic_loss.hpp"

namespace retarget {

// Per-frame per-joint residual rotations, stored as unconstrained 4-vectors
// and normalized on use; these are the optimization variables.
struct ResidualMotion {
  int frame_count = 0;
  int joint_count = 0;
  std::vector<std::array<double, 4>> raw;  // [t * joint_count + k]

  static ResidualMotion identity(int frames, int joints);
  const std::array<double, 4>& at(int t, int k) const {
    return raw[static_cast<size_t>(t) * joint_count + k];
  }
};

struct OptimizerConfig {
  LossWeights weights;
  double step_size = 0.01;
  int iterations = 300;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  double tolerance = 0.0;    // relative loss-change stop; 0 disables
  int refresh_cadence = 1;   // rebuild NNS correspondences every n iterations
  int resample_cadence = 0;  // redraw vertex samples on refresh iterations; 0 = fixed
  std::uint64_t seed = 1;
  SampleCounts samples;
  int threads = 0;

  void validate() const;
};

// Loss weight presets: `final` uses the default coefficients, `curv` trades
// penetration weight for smoothness (temporal weight doubled, penetration
// weight halved).
LossWeights preset_final();
LossWeights preset_curv();

// Scales translation channels by target_height / source_height; the reserved
// fourth channel passes through unchanged.
std::vector<std::array<double, 4>> normalize_global(const std::vector<std::array<double, 4>>& global,
                                                    double source_height, double target_height);

// Q_B = normalize(residual) * Q_A per entry, sign-canonicalized; the global
// channel runs through the height normalizer (equal heights = pass-through).
Motion compose_motion(const ResidualMotion& residual, const Motion& source);
Motion compose_motion(const ResidualMotion& residual, const Motion& source, double source_height,
                      double target_height);

// Everything the objective needs, prepared once per optimization run.
struct RetargetScene {
  const Motion* source = nullptr;
  const SkinnedCharacter* source_char = nullptr;
  const SkinnedCharacter* target_char = nullptr;
  LimbSegmentation segmentation;  // of the target character
  PointSample sample;
  JointOrientationField field;
  LossWeights weights;
  bool use_reconstruction = false;  // self-retarget only
  int threads = 1;

  std::vector<std::array<double, 4>> global_b;  // height-normalized global channel
  std::vector<Vec3> copy_positions;             // FK of the source rotations on the target skeleton
  std::vector<Vec3> source_positions;           // FK on the source skeleton (own global)
  std::vector<Vec3> source_directions;          // propagated orientation field of the source
  std::vector<int> tc_frames;                   // pair subset for the temporal term
};

RetargetScene prepare_scene(const Motion& source, const SkinnedCharacter& source_char,
                            const SkinnedCharacter& target_char, const OptimizerConfig& config);

// Nearest-reference assignments and their deformed normals, captured at one
// candidate motion and held fixed while differentiating (ICP-style
// alternation; gradients through the discrete argmin are undefined).
struct FrozenCorrespondences {
  struct Entry {
    int reference_slot = -1;  // position within the limb's reference sample
    Vec3 normal;              // deformed reference normal at freeze time
  };
  std::vector<Entry> entries;  // [frame][limb][query] flattened
  std::array<int, kLimbCount> query_counts{};
  int per_frame = 0;

  const Entry& at(int frame, int limb_offset, int query) const {
    return entries[static_cast<size_t>(frame) * per_frame + limb_offset + query];
  }
};

FrozenCorrespondences freeze_correspondences(const RetargetScene& scene, const Motion& candidate);

// Value of the total objective with correspondences held fixed; this is the
// exact function loss_gradient differentiates.
double frozen_total_loss(const RetargetScene& scene, const ResidualMotion& residual,
                         const FrozenCorrespondences& frozen);

struct GradientResult {
  double total = 0.0;
  LossReport terms;
  std::vector<std::array<double, 4>> gradient;  // d total / d residual raw entries
};

GradientResult loss_gradient(const RetargetScene& scene, const ResidualMotion& residual,
                             const FrozenCorrespondences& frozen);

struct LossTraceRow {
  int iteration = 0;
  double total = 0.0;
  double best = 0.0;
  LossReport terms;
};

struct SceneMetrics {
  double pen_rate = 0.0;
  double curvature = 0.0;
  double mse_vs_copy = 0.0;
  double local_mse_vs_copy = 0.0;
};

struct RetargetReport {
  Motion result;
  std::vector<LossTraceRow> trace;
  bool converged = false;
  bool diverged = false;
  int best_iteration = 0;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  SceneMetrics before;  // motion copy baseline
  SceneMetrics after;   // optimized result
  double source_curvature = 0.0;
  double wall_ms = 0.0;
};

// Gradient descent with adaptive moments on the residual, starting from the
// identity; returns the best-loss iterate. Aborts with the diverged flag when
// the loss exceeds ten times its initial value.
RetargetReport optimize_sequence(const Motion& source, const SkinnedCharacter& source_char,
                                 const SkinnedCharacter& target_char, const OptimizerConfig& config);

}  // namespace retarget
