#pragma once

#include <optional>

#include "retarget/spatial_loss.hpp"

namespace retarget {

// Coefficients of the total objective.
struct LossWeights {
  double rec = 0.1;
  double con = 0.1;
  double lp = 5.0;
  double tc = 1.0;
  double j = 1.0;
};

struct LossReport {
  std::optional<double> rec, con, lp, tc, j;  // absent when the weight is zero
  double total = 0.0;
};

// Squared quaternion difference (sign-canonicalized) plus squared FK joint
// position difference, both mean-reduced over frames and joints.
double reconstruction_loss(const Motion& original, const Motion& reconstructed,
                           const Skeleton& skeleton);

// Same form as the reconstruction loss, but both motions are driven through
// the target skeleton: penalizes deviation from motion copied onto it.
double constraint_loss(const Motion& source, const Motion& retargeted,
                       const Skeleton& target_skeleton);

// Mean squared difference of the orientation field propagated through both
// motions; detects inward-outward limb flips that rotation-space terms miss.
double joint_orientation_loss(const Motion& source, const Motion& retargeted,
                              const Skeleton& source_skeleton, const Skeleton& target_skeleton,
                              const JointOrientationField& field);

struct TotalLossInputs {
  const Motion* source = nullptr;
  const Skeleton* source_skeleton = nullptr;
  const Motion* retargeted = nullptr;
  const Skeleton* target_skeleton = nullptr;
  const SkinnedCharacter* target_character = nullptr;
  const LimbSegmentation* segmentation = nullptr;
  const PointSample* sample = nullptr;
  const JointOrientationField* field = nullptr;
  int threads = 0;
};

// Weighted sum of the active terms; zero-weight terms are not evaluated and
// are reported as absent.
LossReport total_loss(const TotalLossInputs& inputs, const LossWeights& weights);

}  // namespace retarget
