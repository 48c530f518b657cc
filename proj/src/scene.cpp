#include "retarget/scene.hpp"

#include <cmath>

#include "retarget/io_bvh.hpp"

namespace retarget {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct MeshBuilder {
  SkinnedCharacter& character;

  int add_vertex(const Vec3& p, const Vec3& n, std::vector<SkinInfluence> w) {
    character.vertices.push_back(p);
    character.normals.push_back(normalize3(n));
    character.weights.push_back(std::move(w));
    return character.vertex_count() - 1;
  }

  void add_face(int a, int b, int c) { character.faces.push_back({a, b, c}); }

  // Latitude-longitude sphere bound rigidly to one joint.
  void sphere(const Vec3& center, double radius, int stacks, int slices, int joint) {
    int top = add_vertex(center + Vec3{0, radius, 0}, {0, 1, 0}, {{joint, 1.0}});
    std::vector<int> prev_ring;
    for (int i = 1; i < stacks; ++i) {
      double phi = kPi * i / stacks;
      std::vector<int> ring(slices);
      for (int j = 0; j < slices; ++j) {
        double theta = 2.0 * kPi * j / slices;
        Vec3 n{std::sin(phi) * std::cos(theta), std::cos(phi), std::sin(phi) * std::sin(theta)};
        ring[j] = add_vertex(center + radius * n, n, {{joint, 1.0}});
      }
      if (i == 1) {
        for (int j = 0; j < slices; ++j) add_face(top, ring[(j + 1) % slices], ring[j]);
      } else {
        for (int j = 0; j < slices; ++j) {
          int j2 = (j + 1) % slices;
          add_face(prev_ring[j], prev_ring[j2], ring[j]);
          add_face(ring[j], prev_ring[j2], ring[j2]);
        }
      }
      prev_ring = ring;
    }
    int bottom = add_vertex(center + Vec3{0, -radius, 0}, {0, -1, 0}, {{joint, 1.0}});
    for (int j = 0; j < slices; ++j)
      add_face(prev_ring[j], prev_ring[(j + 1) % slices], bottom);
  }

  // Open tube from a to b. Rings past blend_from blend toward `next_joint`
  // (up to half weight at the far end); next_joint < 0 keeps it rigid.
  void tube(const Vec3& a, const Vec3& b, double radius, int rings, int slices, int joint,
            int next_joint, double blend_from = 0.7) {
    Vec3 axis = normalize3(b - a);
    Vec3 pick = std::abs(axis.y) < 0.9 ? Vec3{0, 1, 0} : Vec3{1, 0, 0};
    Vec3 e1 = normalize3(cross(pick, axis));
    Vec3 e2 = cross(axis, e1);
    std::vector<int> prev_ring;
    for (int i = 0; i < rings; ++i) {
      double t = rings == 1 ? 0.0 : static_cast<double>(i) / (rings - 1);
      Vec3 center = a + t * (b - a);
      std::vector<SkinInfluence> w;
      if (next_joint >= 0 && t > blend_from) {
        double wb = 0.5 * (t - blend_from) / (1.0 - blend_from);
        w = {{joint, 1.0 - wb}, {next_joint, wb}};
      } else {
        w = {{joint, 1.0}};
      }
      std::vector<int> ring(slices);
      for (int j = 0; j < slices; ++j) {
        double theta = 2.0 * kPi * j / slices;
        Vec3 n = std::cos(theta) * e1 + std::sin(theta) * e2;
        ring[j] = add_vertex(center + radius * n, n, w);
      }
      if (i > 0) {
        for (int j = 0; j < slices; ++j) {
          int j2 = (j + 1) % slices;
          add_face(prev_ring[j], ring[j], prev_ring[j2]);
          add_face(prev_ring[j2], ring[j], ring[j2]);
        }
      }
      prev_ring = ring;
    }
  }
};

int scaled(double base, double density) { return std::max(3, static_cast<int>(std::lround(base * density))); }

SkinnedCharacter build_humanoid(const SceneSpec& spec, double torso_radius) {
  SkinnedCharacter character;
  character.skeleton = humanoid_skeleton();
  character.limbs = humanoid_limb_config(character.skeleton);
  MeshBuilder mesh{character};
  const Skeleton& s = character.skeleton;
  std::vector<Vec3> bind = s.bind_positions();
  double d = spec.density;

  mesh.sphere({0, 0.30, 0}, torso_radius, scaled(24, d), scaled(40, d), s.find("Spine1"));
  mesh.sphere({0, 0.68, 0}, 0.09, scaled(12, d), scaled(18, d), s.find("Head"));
  mesh.sphere({0, -0.02, 0}, 0.08, scaled(12, d), scaled(18, d), s.find("Hips"));

  auto arm = [&](const char* side) {
    int a = s.find(std::string(side) + "Arm");
    int f = s.find(std::string(side) + "ForeArm");
    int h = s.find(std::string(side) + "Hand");
    Vec3 tip = bind[h] + 0.08 * normalize3(bind[h] - bind[f]);
    mesh.tube(bind[a], bind[f], spec.arm_radius, scaled(10, d), scaled(14, d), a, f);
    mesh.tube(bind[f], bind[h], spec.arm_radius, scaled(10, d), scaled(14, d), f, h);
    mesh.tube(bind[h], tip, spec.arm_radius, scaled(4, d), scaled(14, d), h, -1);
  };
  auto leg = [&](const char* side) {
    int u = s.find(std::string(side) + "UpLeg");
    int l = s.find(std::string(side) + "Leg");
    int f = s.find(std::string(side) + "Foot");
    int t = s.find(std::string(side) + "Toe");
    mesh.tube(bind[u], bind[l], spec.leg_radius, scaled(10, d), scaled(14, d), u, l);
    mesh.tube(bind[l], bind[f], spec.leg_radius, scaled(10, d), scaled(14, d), l, f);
    mesh.tube(bind[f], bind[t], 0.04, scaled(4, d), scaled(14, d), f, -1);
  };
  arm("Left");
  arm("Right");
  leg("Left");
  leg("Right");

  character.finalize();
  return character;
}

Motion build_sweep_motion(const Skeleton& skeleton, const SceneSpec& spec) {
  Motion motion;
  motion.frame_count = spec.frames;
  motion.joint_count = skeleton.size();
  motion.frame_rate = 30.0;
  motion.rotations.assign(static_cast<size_t>(spec.frames) * skeleton.size(), Quat{});
  motion.global.assign(spec.frames, {0, 0, 0, 0});

  int left_arm = skeleton.find("LeftArm");
  int right_arm = skeleton.find("RightArm");
  int spine = skeleton.find("Spine");
  double deg = kPi / 180.0;
  for (int t = 0; t < spec.frames; ++t) {
    double u = spec.frames == 1 ? 0.0 : static_cast<double>(t) / (spec.frames - 1);
    motion.rot(t, left_arm) = quat_normalize(quat_from_axis_angle(2, -spec.sweep_deg * deg * std::sin(kPi * u)));
    motion.rot(t, right_arm) = quat_normalize(quat_from_axis_angle(2, 5.0 * deg * std::sin(2.0 * kPi * u)));
    motion.rot(t, spine) = quat_normalize(quat_from_axis_angle(2, spec.sway_deg * deg * std::sin(2.0 * kPi * u)));
    motion.global[t] = {0.0, spec.bob * std::sin(2.0 * kPi * u), 0.0, 0.0};
  }
  return motion;
}

}  // namespace

void SceneSpec::validate() const {
  if (id != "arm_sweep" && id != "slim_to_fat") throw DomainError("unknown scene id '" + id + "'");
  if (torso_radius <= 0.0 || target_torso_radius <= 0.0) throw DomainError("torso radius must be positive");
  if (arm_radius <= 0.0 || leg_radius <= 0.0) throw DomainError("limb radius must be positive");
  if (frames < 2) throw DomainError("scenes need at least two frames");
  if (density < 0.25 || density > 8.0) throw DomainError("density out of range [0.25, 8]");
  if (sweep_deg < 0.0 || sweep_deg > 170.0) throw DomainError("sweep angle out of range [0, 170]");
}

Skeleton humanoid_skeleton() {
  Skeleton s;
  auto add = [&](const char* name, int parent, double x, double y, double z) {
    s.joints.push_back({name, parent, {x, y, z}});
  };
  add("Hips", -1, 0, 0, 0);
  add("Spine", 0, 0, 0.12, 0);
  add("Spine1", 1, 0, 0.14, 0);
  add("Spine2", 2, 0, 0.14, 0);
  add("Neck", 3, 0, 0.12, 0);
  add("Head", 4, 0, 0.10, 0);
  add("LeftShoulder", 3, 0.06, 0.045, 0);
  add("LeftArm", 6, 0.12, 0, 0);
  add("LeftForeArm", 7, 0.28, 0, 0);
  add("LeftHand", 8, 0.24, 0, 0);
  add("RightShoulder", 3, -0.06, 0.045, 0);
  add("RightArm", 10, -0.12, 0, 0);
  add("RightForeArm", 11, -0.28, 0, 0);
  add("RightHand", 12, -0.24, 0, 0);
  add("LeftUpLeg", 0, 0.12, -0.06, 0);
  add("LeftLeg", 14, 0, -0.42, 0);
  add("LeftFoot", 15, 0, -0.40, 0);
  add("LeftToe", 16, 0, -0.06, 0.12);
  add("RightUpLeg", 0, -0.12, -0.06, 0);
  add("RightLeg", 18, 0, -0.42, 0);
  add("RightFoot", 19, 0, -0.40, 0);
  add("RightToe", 20, 0, -0.06, 0.12);
  s.validate();
  return s;
}

LimbConfig humanoid_limb_config(const Skeleton& skeleton) {
  LimbConfig config;
  auto idx = [&](const char* name) {
    int i = skeleton.find(name);
    if (i < 0) throw DomainError(std::string("missing joint '") + name + "'");
    return i;
  };
  config.limb_joints[kRightArm] = {idx("RightArm"), idx("RightForeArm"), idx("RightHand")};
  config.limb_joints[kLeftArm] = {idx("LeftArm"), idx("LeftForeArm"), idx("LeftHand")};
  config.limb_joints[kRightLeg] = {idx("RightUpLeg"), idx("RightLeg"), idx("RightFoot"), idx("RightToe")};
  config.limb_joints[kLeftLeg] = {idx("LeftUpLeg"), idx("LeftLeg"), idx("LeftFoot"), idx("LeftToe")};
  config.excluded_joints = {idx("LeftShoulder"), idx("RightShoulder"), idx("LeftArm"),
                            idx("RightArm"),     idx("LeftUpLeg"),     idx("RightUpLeg")};
  return config;
}

SceneAssets generate_scene(const SceneSpec& spec) {
  spec.validate();
  SceneAssets assets;
  assets.source = build_humanoid(spec, spec.torso_radius);
  if (spec.id == "slim_to_fat") {
    assets.target = build_humanoid(spec, spec.target_torso_radius);
  } else {
    assets.target = assets.source;
  }
  assets.motion = build_sweep_motion(assets.source.skeleton, spec);
  return assets;
}

}  // namespace retarget
