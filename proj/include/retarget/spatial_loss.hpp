#pragma once

#include <cstdint>

#include "retarget/skinning.hpp"

namespace retarget {

struct PenetrationBreakdown {
  double total = 0.0;  // frame-averaged penetration penalty
  // Mean positive depth over each limb's query samples, per frame.
  std::array<std::vector<double>, kLimbCount> per_limb_frame_mean;
  std::int64_t penetrating_count = 0;
};

struct PenetrationOptions {
  double margin = 0.0;      // inflation added to the depth before the positive part
  int threads = 0;          // 0 = hardware
  bool brute_force = false; // linear-scan correspondences instead of the tree
};

// Limb penetration penalty over the whole motion. Per frame: deform the
// sampled query and reference vertices by LBS, find each query's nearest
// reference vertex within its limb's reference sample, take the positive
// part of the normal-based signed depth, and average by the total query
// count; frames are then averaged.
PenetrationBreakdown limb_penetration_loss(const SkinnedCharacter& character,
                                           const LimbSegmentation& segmentation,
                                           const PointSample& sample, const Motion& motion,
                                           const PenetrationOptions& options = {});

}  // namespace retarget
