#pragma once

#include <cstdint>
#include <string>

#include "retarget/skinning.hpp"

namespace retarget {

// Parameters of the procedural desk-scale test scenes. `arm_sweep` builds a
// humanoid whose left arm sweeps downward across the torso; `slim_to_fat`
// reuses the sweep but inflates the target torso so direct motion copy
// penetrates it.
struct SceneSpec {
  std::string id = "arm_sweep";
  double torso_radius = 0.115;
  double target_torso_radius = 0.32;  // slim_to_fat only
  double arm_radius = 0.035;
  double leg_radius = 0.045;
  double sweep_deg = 80.0;
  double sway_deg = 2.0;
  double bob = 0.02;
  int frames = 60;
  double density = 1.0;  // scales mesh resolution in both ring directions
  std::uint64_t seed = 1;

  void validate() const;
};

struct SceneAssets {
  SkinnedCharacter source;
  SkinnedCharacter target;
  Motion motion;  // source motion
};

// The 22-joint humanoid used by all scenes.
Skeleton humanoid_skeleton();

// Limb/exclusion joint sets for the humanoid, by name lookup.
LimbConfig humanoid_limb_config(const Skeleton& skeleton);

// Deterministic in every byte for a fixed spec.
SceneAssets generate_scene(const SceneSpec& spec);

}  // namespace retarget
