#include "retarget/io_json.hpp"

#include <json.hpp>

namespace retarget {

namespace {

using nlohmann::json;

json parse_json(std::string_view text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
}

void reject_unknown(const json& obj, std::initializer_list<const char*> known, const char* where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : known)
      if (it.key() == k) ok = true;
    if (!ok) throw ParseError(std::string("unknown key '") + it.key() + "' in " + where);
  }
}

double as_number(const json& v, const char* what) {
  if (!v.is_number()) throw ParseError(std::string(what) + " must be a number");
  return v.get<double>();
}

Vec3 as_vec3(const json& v, const char* what) {
  if (!v.is_array() || v.size() != 3) throw ParseError(std::string(what) + " must be a 3-array");
  return {as_number(v[0], what), as_number(v[1], what), as_number(v[2], what)};
}

}  // namespace

bool WeightsSidecar::has_skeleton() const {
  for (const JointEntry& j : joints)
    if (!j.parent.has_value() || !j.offset.has_value()) return false;
  return !joints.empty();
}

Skeleton WeightsSidecar::skeleton() const {
  if (!has_skeleton())
    throw DomainError("weights sidecar does not carry a self-contained skeleton");
  Skeleton s;
  for (const JointEntry& j : joints) s.joints.push_back({j.name, *j.parent, *j.offset});
  s.validate();
  return s;
}

WeightsSidecar parse_weights_sidecar(std::string_view text) {
  json root = parse_json(text, "weights sidecar");
  if (!root.is_object()) throw ParseError("weights sidecar must be a JSON object");
  reject_unknown(root, {"joints", "weights", "limbs", "excluded"}, "weights sidecar");
  if (!root.contains("joints") || !root.contains("weights"))
    throw ParseError("weights sidecar needs 'joints' and 'weights'");

  WeightsSidecar sidecar;
  for (const json& j : root.at("joints")) {
    WeightsSidecar::JointEntry entry;
    if (j.is_string()) {
      entry.name = j.get<std::string>();
    } else if (j.is_object()) {
      reject_unknown(j, {"name", "parent", "offset"}, "joint entry");
      entry.name = j.at("name").get<std::string>();
      if (j.contains("parent")) entry.parent = j.at("parent").get<int>();
      if (j.contains("offset")) entry.offset = as_vec3(j.at("offset"), "joint offset");
    } else {
      throw ParseError("joint entries must be names or objects");
    }
    sidecar.joints.push_back(std::move(entry));
  }

  for (const json& row : root.at("weights")) {
    std::vector<std::pair<int, double>> entries;
    if (!row.is_array()) throw ParseError("weight rows must be arrays of [joint, weight] pairs");
    for (const json& pair : row) {
      if (!pair.is_array() || pair.size() != 2) throw ParseError("weight entries must be [joint, weight]");
      entries.emplace_back(pair[0].get<int>(), as_number(pair[1], "weight"));
    }
    sidecar.weights.push_back(std::move(entries));
  }

  if (root.contains("limbs")) {
    const json& limbs = root.at("limbs");
    reject_unknown(limbs, {kLimbNames[0], kLimbNames[1], kLimbNames[2], kLimbNames[3]}, "limbs");
    for (int l = 0; l < kLimbCount; ++l)
      if (limbs.contains(kLimbNames[l]))
        for (const json& name : limbs.at(kLimbNames[l]))
          sidecar.limb_joint_names[l].push_back(name.get<std::string>());
  }
  if (root.contains("excluded"))
    for (const json& name : root.at("excluded"))
      sidecar.excluded_joint_names.push_back(name.get<std::string>());
  return sidecar;
}

std::string write_weights_sidecar(const WeightsSidecar& sidecar) {
  json root;
  root["joints"] = json::array();
  for (const auto& j : sidecar.joints) {
    if (j.parent.has_value() && j.offset.has_value()) {
      root["joints"].push_back({{"name", j.name},
                                {"parent", *j.parent},
                                {"offset", {j.offset->x, j.offset->y, j.offset->z}}});
    } else {
      root["joints"].push_back(j.name);
    }
  }
  root["weights"] = json::array();
  for (const auto& row : sidecar.weights) {
    json jrow = json::array();
    for (const auto& [joint, weight] : row) jrow.push_back({joint, weight});
    root["weights"].push_back(std::move(jrow));
  }
  root["limbs"] = json::object();
  for (int l = 0; l < kLimbCount; ++l) root["limbs"][kLimbNames[l]] = sidecar.limb_joint_names[l];
  root["excluded"] = sidecar.excluded_joint_names;
  return root.dump(1);
}

WeightsSidecar sidecar_from_character(const SkinnedCharacter& character) {
  WeightsSidecar sidecar;
  for (const Joint& j : character.skeleton.joints)
    sidecar.joints.push_back({j.name, j.parent, j.offset});
  for (const auto& row : character.weights) {
    std::vector<std::pair<int, double>> entries;
    for (const SkinInfluence& inf : row) entries.emplace_back(inf.joint, inf.weight);
    sidecar.weights.push_back(std::move(entries));
  }
  for (int l = 0; l < kLimbCount; ++l)
    for (int joint : character.limbs.limb_joints[l])
      sidecar.limb_joint_names[l].push_back(character.skeleton.joints[joint].name);
  for (int joint : character.limbs.excluded_joints)
    sidecar.excluded_joint_names.push_back(character.skeleton.joints[joint].name);
  return sidecar;
}

SkinnedCharacter build_character(const ObjData& mesh, const WeightsSidecar& sidecar,
                                 const Skeleton* paired_skeleton) {
  SkinnedCharacter character;
  character.skeleton = sidecar.has_skeleton() ? sidecar.skeleton() : [&] {
    if (!paired_skeleton)
      throw DomainError("weights sidecar has bare joint names and no paired skeleton was given");
    return *paired_skeleton;
  }();

  // Sidecar joint slots resolve to skeleton indices by name.
  std::vector<int> joint_map(sidecar.joints.size());
  for (size_t i = 0; i < sidecar.joints.size(); ++i) {
    int idx = character.skeleton.find(sidecar.joints[i].name);
    if (idx < 0)
      throw DomainError("sidecar joint '" + sidecar.joints[i].name + "' not found in skeleton");
    joint_map[i] = idx;
  }

  if (sidecar.weights.size() != mesh.vertices.size())
    throw ShapeError("weight rows do not match mesh vertex count");
  character.vertices = mesh.vertices;
  character.normals = mesh.normals;
  character.faces = mesh.faces;
  for (const auto& row : sidecar.weights) {
    std::vector<SkinInfluence> influences;
    for (const auto& [slot, weight] : row) {
      if (slot < 0 || slot >= static_cast<int>(joint_map.size()))
        throw ShapeError("weight entry references an unknown joint slot");
      influences.push_back({joint_map[slot], weight});
    }
    character.weights.push_back(std::move(influences));
  }
  for (int l = 0; l < kLimbCount; ++l)
    for (const std::string& name : sidecar.limb_joint_names[l]) {
      int idx = character.skeleton.find(name);
      if (idx < 0) throw DomainError("limb joint '" + name + "' not found in skeleton");
      character.limbs.limb_joints[l].push_back(idx);
    }
  for (const std::string& name : sidecar.excluded_joint_names) {
    int idx = character.skeleton.find(name);
    if (idx < 0) throw DomainError("excluded joint '" + name + "' not found in skeleton");
    character.limbs.excluded_joints.push_back(idx);
  }
  character.finalize();
  return character;
}

RunConfig parse_run_config(std::string_view text) {
  json root = parse_json(text, "config");
  if (!root.is_object()) throw ParseError("config must be a JSON object");
  reject_unknown(root, {"weights", "optimizer", "samples", "scene"}, "config");
  RunConfig config;

  if (root.contains("weights")) {
    const json& w = root.at("weights");
    reject_unknown(w, {"rec", "con", "lp", "tc", "j"}, "weights");
    if (w.contains("rec")) config.weights.rec = as_number(w.at("rec"), "rec");
    if (w.contains("con")) config.weights.con = as_number(w.at("con"), "con");
    if (w.contains("lp")) config.weights.lp = as_number(w.at("lp"), "lp");
    if (w.contains("tc")) config.weights.tc = as_number(w.at("tc"), "tc");
    if (w.contains("j")) config.weights.j = as_number(w.at("j"), "j");
    for (double v : {config.weights.rec, config.weights.con, config.weights.lp, config.weights.tc,
                     config.weights.j})
      if (v < 0.0 || !std::isfinite(v)) throw ParseError("loss weights must be finite and nonnegative");
  }
  if (root.contains("optimizer")) {
    const json& o = root.at("optimizer");
    reject_unknown(o,
                   {"step_size", "iterations", "beta1", "beta2", "adam_epsilon", "tolerance",
                    "refresh_cadence", "resample_cadence", "seed", "threads"},
                   "optimizer");
    auto& c = config.optimizer;
    if (o.contains("step_size")) c.step_size = as_number(o.at("step_size"), "step_size");
    if (o.contains("iterations")) c.iterations = o.at("iterations").get<int>();
    if (o.contains("beta1")) c.beta1 = as_number(o.at("beta1"), "beta1");
    if (o.contains("beta2")) c.beta2 = as_number(o.at("beta2"), "beta2");
    if (o.contains("adam_epsilon")) c.adam_epsilon = as_number(o.at("adam_epsilon"), "adam_epsilon");
    if (o.contains("tolerance")) c.tolerance = as_number(o.at("tolerance"), "tolerance");
    if (o.contains("refresh_cadence")) c.refresh_cadence = o.at("refresh_cadence").get<int>();
    if (o.contains("resample_cadence")) c.resample_cadence = o.at("resample_cadence").get<int>();
    if (o.contains("seed")) c.seed = o.at("seed").get<std::uint64_t>();
    if (o.contains("threads")) c.threads = o.at("threads").get<int>();
  }
  if (root.contains("samples")) {
    const json& s = root.at("samples");
    reject_unknown(s, {"shape", "limb_query", "limb_reference"}, "samples");
    if (s.contains("shape")) config.optimizer.samples.shape = s.at("shape").get<int>();
    if (s.contains("limb_query")) config.optimizer.samples.limb_query = s.at("limb_query").get<int>();
    if (s.contains("limb_reference"))
      config.optimizer.samples.limb_reference = s.at("limb_reference").get<int>();
  }
  if (root.contains("scene")) {
    const json& s = root.at("scene");
    reject_unknown(s,
                   {"id", "torso_radius", "target_torso_radius", "arm_radius", "leg_radius",
                    "sweep_deg", "sway_deg", "bob", "frames", "density", "seed"},
                   "scene");
    auto& spec = config.scene;
    if (s.contains("id")) spec.id = s.at("id").get<std::string>();
    if (s.contains("torso_radius")) spec.torso_radius = as_number(s.at("torso_radius"), "torso_radius");
    if (s.contains("target_torso_radius"))
      spec.target_torso_radius = as_number(s.at("target_torso_radius"), "target_torso_radius");
    if (s.contains("arm_radius")) spec.arm_radius = as_number(s.at("arm_radius"), "arm_radius");
    if (s.contains("leg_radius")) spec.leg_radius = as_number(s.at("leg_radius"), "leg_radius");
    if (s.contains("sweep_deg")) spec.sweep_deg = as_number(s.at("sweep_deg"), "sweep_deg");
    if (s.contains("sway_deg")) spec.sway_deg = as_number(s.at("sway_deg"), "sway_deg");
    if (s.contains("bob")) spec.bob = as_number(s.at("bob"), "bob");
    if (s.contains("frames")) spec.frames = s.at("frames").get<int>();
    if (s.contains("density")) spec.density = as_number(s.at("density"), "density");
    if (s.contains("seed")) spec.seed = s.at("seed").get<std::uint64_t>();
  }
  config.optimizer.weights = config.weights;
  return config;
}

}  // namespace retarget
