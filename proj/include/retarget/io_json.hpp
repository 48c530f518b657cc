#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "retarget/io_obj.hpp"
#include "retarget/optimizer.hpp"
#include "retarget/scene.hpp"
#include "retarget/skinning.hpp"

namespace retarget {

// Interchange form for skinning weights and limb configuration. Joint
// entries are either bare names (the skeleton comes from a paired BVH) or
// full records with parent and offset, making the sidecar self-contained.
struct WeightsSidecar {
  struct JointEntry {
    std::string name;
    std::optional<int> parent;
    std::optional<Vec3> offset;
  };
  std::vector<JointEntry> joints;
  std::vector<std::vector<std::pair<int, double>>> weights;  // (joint slot, weight)
  std::array<std::vector<std::string>, kLimbCount> limb_joint_names;
  std::vector<std::string> excluded_joint_names;

  bool has_skeleton() const;
  Skeleton skeleton() const;  // throws unless self-contained
};

WeightsSidecar parse_weights_sidecar(std::string_view text);
std::string write_weights_sidecar(const WeightsSidecar& sidecar);

WeightsSidecar sidecar_from_character(const SkinnedCharacter& character);

// Assembles a skinned character from a mesh and sidecar. The skeleton comes
// from the sidecar when self-contained, otherwise from `paired_skeleton`;
// sidecar joint names must resolve against it either way.
SkinnedCharacter build_character(const ObjData& mesh, const WeightsSidecar& sidecar,
                                 const Skeleton* paired_skeleton = nullptr);

// Run configuration for the CLI; unknown keys are rejected.
struct RunConfig {
  LossWeights weights;
  OptimizerConfig optimizer;
  SceneSpec scene;
};

RunConfig parse_run_config(std::string_view text);

}  // namespace retarget
