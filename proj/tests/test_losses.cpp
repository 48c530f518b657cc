#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "retarget/metrics.hpp"
#include "retarget/scene.hpp"
#include "retarget/semantic_loss.hpp"
#include "retarget/temporal_loss.hpp"

using namespace retarget;

namespace {

Motion identity_motion(int frames, int joints) {
  Motion m;
  m.frame_count = frames;
  m.joint_count = joints;
  m.rotations.assign(static_cast<size_t>(frames) * joints, Quat{});
  m.global.assign(frames, {0, 0, 0, 0});
  return m;
}

Quat axis_angle(const Vec3& axis, double radians) {
  Vec3 u = normalize3(axis);
  double h = radians / 2;
  return {std::cos(h), std::sin(h) * u.x, std::sin(h) * u.y, std::sin(h) * u.z};
}

std::vector<Vec3> fibonacci_sphere(int n, double radius) {
  std::vector<Vec3> pts(n);
  const double golden = M_PI * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    double y = 1.0 - 2.0 * (i + 0.5) / n;
    double r = std::sqrt(1.0 - y * y);
    double theta = golden * i;
    pts[i] = radius * Vec3{r * std::cos(theta), y, r * std::sin(theta)};
  }
  return pts;
}

// Torso sphere bound to the root plus four point strips, one per limb. The
// left-arm strip starts at x = start and runs outward, penetrating the unit
// sphere wherever |x| < 1.
struct StripScene {
  SkinnedCharacter character;
  LimbSegmentation segmentation;
  PointSample sample;
  Motion motion;
};

StripScene strip_scene(double left_arm_start, int frames = 1) {
  StripScene scene;
  SkinnedCharacter& c = scene.character;
  c.skeleton.joints = {{"core", -1, {0, 0, 0}},
                       {"ra", 0, {0, 0.1, 0}},
                       {"la", 0, {0, 0.2, 0}},
                       {"rl", 0, {0, 0.3, 0}},
                       {"ll", 0, {0, 0.4, 0}}};
  auto add = [&](const Vec3& p, const Vec3& n, int joint) {
    c.vertices.push_back(p);
    c.normals.push_back(normalize3(n));
    c.weights.push_back({{joint, 1.0}});
  };
  for (const Vec3& p : fibonacci_sphere(1500, 1.0)) add(p, p, 0);
  // Far strips sit so far out that the sphere is always their nearest
  // reference, keeping their signed depths strictly negative.
  for (int i = 0; i < 200; ++i) {
    double t = i / 199.0;
    add({left_arm_start + t, 0.01, 0.02}, {0, 0, 1}, 2);  // left arm probe strip
    add({-1000.0 - t, 0, 0}, {0, 0, 1}, 1);
    add({0, -1000.0 - t, 0}, {0, 0, 1}, 4);
    add({0, 0, -1000.0 - t}, {0, 0, 1}, 3);
  }
  c.limbs.limb_joints[kRightArm] = {1};
  c.limbs.limb_joints[kLeftArm] = {2};
  c.limbs.limb_joints[kRightLeg] = {3};
  c.limbs.limb_joints[kLeftLeg] = {4};
  c.finalize();
  scene.segmentation = segment_limbs(c, c.limbs);
  SampleCounts counts;
  counts.shape = 64;
  counts.limb_query = 200;     // exactly the strip sizes: full deterministic sets
  counts.limb_reference = 2100;  // full reference sets
  scene.sample = sample_points(c, scene.segmentation, counts, 5);
  scene.motion = identity_motion(frames, 5);
  return scene;
}

// All-pairs oracle for the penetration penalty on a strip scene, sharing
// only the rest-pose geometry with the implementation.
double oracle_lp(const StripScene& scene) {
  double total_queries = 0;
  for (int l = 0; l < kLimbCount; ++l) total_queries += scene.sample.limb_query[l].indices.size();
  double sum = 0.0;
  for (int l = 0; l < kLimbCount; ++l) {
    for (int qi : scene.sample.limb_query[l].indices) {
      const Vec3 q = scene.character.vertices[qi];
      int best = -1;
      double best_d = std::numeric_limits<double>::infinity();
      const auto& refs = scene.sample.limb_reference[l].indices;
      for (size_t r = 0; r < refs.size(); ++r) {
        Vec3 diff = q - scene.character.vertices[refs[r]];
        double d = dot(diff, diff);
        if (d < best_d) {
          best_d = d;
          best = static_cast<int>(r);
        }
      }
      Vec3 nearest = scene.character.vertices[refs[best]];
      double phi = -dot(q - nearest, scene.character.normals[refs[best]]);
      if (phi > 0) sum += phi;
    }
  }
  return sum / total_queries;
}

}  // namespace

TEST_CASE("separated limbs give zero penetration") {
  StripScene scene = strip_scene(1.2);
  PenetrationBreakdown out =
      limb_penetration_loss(scene.character, scene.segmentation, scene.sample, scene.motion);
  CHECK(out.total == 0.0);
  CHECK(out.penetrating_count == 0);
}

TEST_CASE("penetration matches the all-pairs oracle and grows with depth") {
  StripScene shallow = strip_scene(0.5);
  PenetrationBreakdown a =
      limb_penetration_loss(shallow.character, shallow.segmentation, shallow.sample, shallow.motion);
  CHECK(a.total > 0.0);
  CHECK(a.total == doctest::Approx(oracle_lp(shallow)).epsilon(1e-12));

  StripScene deep = strip_scene(0.3);
  PenetrationBreakdown b =
      limb_penetration_loss(deep.character, deep.segmentation, deep.sample, deep.motion);
  CHECK(b.total > a.total);

  // Tree-indexed evaluation equals brute force bit for bit.
  PenetrationOptions brute;
  brute.brute_force = true;
  PenetrationBreakdown c =
      limb_penetration_loss(deep.character, deep.segmentation, deep.sample, deep.motion, brute);
  CHECK(b.total == c.total);
  CHECK(b.penetrating_count == c.penetrating_count);
}

TEST_CASE("penetration is invariant under rigid translation") {
  StripScene scene = strip_scene(0.4, 2);
  PenetrationBreakdown base =
      limb_penetration_loss(scene.character, scene.segmentation, scene.sample, scene.motion);
  scene.motion.global[0] = {7, -2, 3, 0};
  scene.motion.global[1] = {-1, 5, 0, 0};
  PenetrationBreakdown moved =
      limb_penetration_loss(scene.character, scene.segmentation, scene.sample, scene.motion);
  CHECK(moved.total == doctest::Approx(base.total).epsilon(1e-9));
}

TEST_CASE("removing penetrating queries drives the loss to zero") {
  StripScene scene = strip_scene(0.5);
  // Drop every left-arm query that sits inside the sphere.
  auto& queries = scene.sample.limb_query[kLeftArm].indices;
  std::vector<int> kept;
  // Keep a margin above the sampled surface so discretization noise cannot
  // read a hull vertex as penetrating.
  for (int v : queries)
    if (norm(scene.character.vertices[v]) >= 1.05) kept.push_back(v);
  queries = kept;
  PenetrationBreakdown out =
      limb_penetration_loss(scene.character, scene.segmentation, scene.sample, scene.motion);
  CHECK(out.total == 0.0);
}

TEST_CASE("excluded vertices are neither queries nor references") {
  SceneSpec spec;
  spec.id = "slim_to_fat";
  spec.frames = 4;
  spec.density = 0.5;
  SceneAssets assets = generate_scene(spec);
  LimbSegmentation seg = segment_limbs(assets.target, assets.target.limbs);
  CHECK(!seg.excluded_vertices.empty());
  std::vector<char> is_excluded(assets.target.vertex_count(), 0);
  for (int v : seg.excluded_vertices) is_excluded[v] = 1;
  size_t counted = 0;
  for (int l = 0; l < kLimbCount; ++l) {
    for (int v : seg.limb_vertices[l]) CHECK(!is_excluded[v]);
    for (int v : seg.reference_vertices[l]) CHECK(!is_excluded[v]);
    counted += seg.limb_vertices[l].size();
  }
  CHECK(counted + seg.excluded_vertices.size() <= static_cast<size_t>(assets.target.vertex_count()));
}

TEST_CASE("trajectory normalization") {
  std::vector<Vec3> in_cube = {{0, 0, 0}, {1, 0.5, 0.25}, {0.5, 1, 1}};
  NormalizedTrajectory fixed = normalize_trajectory(in_cube);
  for (size_t i = 0; i < in_cube.size(); ++i) CHECK(norm(fixed.points[i] - in_cube[i]) < 1e-12);

  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> uni(-2, 2);
  std::vector<Vec3> traj(8);
  for (auto& p : traj) p = {uni(rng), uni(rng), uni(rng)};
  NormalizedTrajectory base = normalize_trajectory(traj);

  std::vector<Vec3> shifted = traj;
  for (auto& p : shifted) p += Vec3{7, -3, 2};
  NormalizedTrajectory t2 = normalize_trajectory(shifted);
  for (size_t i = 0; i < traj.size(); ++i) CHECK(norm(t2.points[i] - base.points[i]) < 1e-12);

  std::vector<Vec3> scaled = traj;
  for (auto& p : scaled) p = 5.0 * p;
  NormalizedTrajectory t3 = normalize_trajectory(scaled);
  for (size_t i = 0; i < traj.size(); ++i) CHECK(norm(t3.points[i] - base.points[i]) < 1e-12);

  for (const Vec3& p : base.points) {
    CHECK(p.x > -1e-9);
    CHECK(p.x < 1 + 1e-9);
    CHECK(p.y > -1e-9);
    CHECK(p.y < 1 + 1e-9);
    CHECK(p.z > -1e-9);
    CHECK(p.z < 1 + 1e-9);
  }

  NormalizedTrajectory deg = normalize_trajectory(std::vector<Vec3>{{3, 3, 3}, {3, 3, 3}});
  CHECK(deg.degenerate);
  CHECK(deg.scale == 1.0);
  CHECK(norm(deg.points[0]) == 0.0);
}

TEST_CASE("motion matrix") {
  NormalizedTrajectory still;
  still.points = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
  MotionMatrix zero = motion_matrix(still);
  for (const Vec3& v : zero.vectors) CHECK(norm(v) == 0.0);

  // Straight line with unit steps along x normalizes to steps 1/(T-1).
  std::vector<Vec3> line;
  const int t_count = 5;
  for (int t = 0; t < t_count; ++t) line.push_back({static_cast<double>(t), 0, 0});
  MotionMatrix m = motion_matrix(normalize_trajectory(line));
  for (int i = 0; i < t_count; ++i)
    for (int j = 0; j < t_count; ++j) {
      CHECK(m.at(i, j).x == doctest::Approx((j - i) / 4.0).epsilon(1e-12));
      CHECK(m.at(i, j).y == 0.0);
    }

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> uni(-1, 1);
  std::vector<Vec3> traj(7);
  for (auto& p : traj) p = {uni(rng), uni(rng), uni(rng)};
  MotionMatrix r = motion_matrix(normalize_trajectory(traj));
  CHECK(norm(r.at(2, 5) + r.at(5, 2)) < 1e-15);
  for (int i = 0; i < 7; ++i) CHECK(norm(r.at(i, i)) == 0.0);
}

TEST_CASE("temporal consistency: self, scale invariance, hand value") {
  // Hand case: one root joint whose trajectory is the global channel.
  Skeleton single;
  single.joints = {{"root", -1, {0, 0, 0}}};
  Motion a = identity_motion(3, 1);
  a.global = {{0, 0, 0, 0}, {1, 0, 0, 0}, {3, 0, 0, 0}};
  Motion b = identity_motion(3, 1);
  b.global = {{0, 0, 0, 0}, {2, 0, 0, 0}, {4, 0, 0, 0}};
  // Normalized x-coordinates: a -> (0, 1/3, 1), b -> (0, 1/2, 1). The pair
  // differences give sum of squares 4 * (1/6)^2 = 1/9, mean over 9 pairs.
  CHECK(temporal_consistency_loss(a, single, b, single) == doctest::Approx(1.0 / 81.0).epsilon(1e-12));
  CHECK(temporal_consistency_loss(a, single, a, single) == 0.0);
  CHECK(temporal_consistency_loss(a, single, b, single) ==
        doctest::Approx(temporal_consistency_loss(b, single, a, single)));

  // Skeleton scale invariance: same rotations on a doubled skeleton.
  Skeleton chain;
  chain.joints = {{"a", -1, {0, 0, 0}}, {"b", 0, {0, 0.5, 0}}, {"c", 1, {0.3, 0.2, 0}}};
  Skeleton doubled = chain;
  for (auto& j : doubled.joints) j.offset = 2.0 * j.offset;
  Motion m = identity_motion(6, 3);
  std::mt19937_64 rng(21);
  std::normal_distribution<double> gauss;
  for (auto& q : m.rotations) q = quat_normalize(Quat{2 + gauss(rng), 0.3 * gauss(rng), 0.3 * gauss(rng), 0.3 * gauss(rng)});
  CHECK(temporal_consistency_loss(m, chain, m, doubled) < 1e-9);

  // Translation invariance of either side.
  Motion shifted = m;
  for (auto& d : shifted.global) d = {d[0] + 4, d[1] - 1, d[2] + 2, d[3]};
  CHECK(temporal_consistency_loss(m, chain, shifted, chain) < 1e-9);

  Motion wrong = identity_motion(4, 3);
  CHECK_THROWS_AS(temporal_consistency_loss(m, chain, wrong, chain), ShapeError);
}

TEST_CASE("basic smoothness loss") {
  Skeleton single;
  single.joints = {{"root", -1, {0, 0, 0}}};
  Motion still = identity_motion(5, 1);
  CHECK(basic_smoothness_loss(still, single) == 0.0);

  Motion moving = identity_motion(5, 1);
  for (int t = 0; t < 5; ++t) moving.global[t] = {0.25 * t, 0, 0, 0};
  CHECK(basic_smoothness_loss(moving, single) == doctest::Approx(0.25 * 0.25).epsilon(1e-12));

  Motion one = identity_motion(1, 1);
  CHECK_THROWS_AS(basic_smoothness_loss(one, single), ShapeError);
}

TEST_CASE("smoothness relates to adjacent motion-matrix entries on a 1-joint line") {
  // A: uniform unit steps along x. B: the same line with one step stretched.
  std::vector<Vec3> line_a = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0}};
  std::vector<Vec3> line_b = {{0, 0, 0}, {1.2, 0, 0}, {2, 0, 0}, {3, 0, 0}};
  NormalizedTrajectory na = normalize_trajectory(line_a);
  NormalizedTrajectory nb = normalize_trajectory(line_b);
  CHECK(nb.scale == doctest::Approx(3.0));

  // Unnormalizing an adjacent motion vector recovers the raw displacement,
  // so the adjacent slice of the matrix difference carries exactly the
  // consecutive-step differences the smoothness loss sees.
  for (int t = 0; t < 3; ++t) {
    Vec3 step = nb.scale * (nb.points[t + 1] - nb.points[t]);
    CHECK(norm(step - (line_b[t + 1] - line_b[t])) < 1e-12);
  }
  // Hand value: normalized steps differ by 0.2/3 at t=0 and -0.2/3 at t=1.
  double adjacent_sum = 0.0;
  for (int t = 0; t < 3; ++t)
    adjacent_sum += norm2((nb.points[t + 1] - nb.points[t]) - (na.points[t + 1] - na.points[t]));
  CHECK(adjacent_sum == doctest::Approx(2.0 * (0.2 / 3.0) * (0.2 / 3.0)).epsilon(1e-12));

  // The smoothness loss on B as a root trajectory, hand computed.
  Skeleton single;
  single.joints = {{"root", -1, {0, 0, 0}}};
  Motion mb = identity_motion(4, 1);
  for (int t = 0; t < 4; ++t) mb.global[t] = {line_b[t].x, 0, 0, 0};
  CHECK(basic_smoothness_loss(mb, single) ==
        doctest::Approx((1.44 + 0.64 + 1.0) / 3.0).epsilon(1e-12));
}

TEST_CASE("reconstruction loss") {
  Skeleton chain;
  chain.joints = {{"a", -1, {0, 0, 0}}, {"b", 0, {0, 1, 0}}};
  Motion original = identity_motion(1, 2);
  Motion same = original;
  CHECK(reconstruction_loss(original, same, chain) == 0.0);

  // Sign flips vanish after canonicalization.
  Motion flipped = original;
  for (auto& q : flipped.rotations) q = Quat{-q.w, -q.x, -q.y, -q.z};
  CHECK(reconstruction_loss(original, flipped, chain) == 0.0);

  // Root turned 90 degrees about z: rotation term (2 - sqrt(2)) / 2, child
  // position moves (0,1,0) -> (-1,0,0), squared distance 2, mean 1.
  Motion rotated = original;
  rotated.rot(0, 0) = axis_angle({0, 0, 1}, M_PI / 2);
  double expected = (2.0 - std::sqrt(2.0)) / 2.0 + 1.0;
  CHECK(reconstruction_loss(original, rotated, chain) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("constraint loss uses only the target skeleton") {
  Skeleton target;
  target.joints = {{"a", -1, {0, 0, 0}}, {"b", 0, {0, 2, 0}}};
  Motion source = identity_motion(2, 2);
  Motion retargeted = source;
  CHECK(constraint_loss(source, retargeted, target) == 0.0);

  retargeted.rot(1, 0) = axis_angle({1, 0, 0}, 0.4);
  double v1 = constraint_loss(source, retargeted, target);
  CHECK(v1 > 0.0);

  // Same value regardless of any source-side skeleton: only gamma_B enters.
  Skeleton shrunken = target;
  shrunken.joints[1].offset = {0, 0.1, 0};
  double v2 = constraint_loss(source, retargeted, shrunken);
  CHECK(v2 != doctest::Approx(v1));  // differs because gamma_B itself changed

  // Single-joint hand value: rotation diff only, positions at the root.
  Skeleton single;
  single.joints = {{"a", -1, {0, 0, 0}}};
  Motion src1 = identity_motion(1, 1);
  Motion ret1 = src1;
  ret1.rot(0, 0) = axis_angle({0, 1, 0}, 0.3);
  Quat d = ret1.rot(0, 0) - Quat{1, 0, 0, 0};
  CHECK(constraint_loss(src1, ret1, single) == doctest::Approx(qdot(d, d)).epsilon(1e-12));
}

TEST_CASE("joint orientation loss flags arm flips") {
  Skeleton chain;
  chain.joints = {{"root", -1, {0, 0, 0}}, {"shoulder", 0, {0, 1, 0}}, {"hand", 1, {1, 0, 0}}};
  JointOrientationField field = JointOrientationField::uniform(3);
  Motion source = identity_motion(2, 3);
  for (int t = 0; t < 2; ++t) source.rot(t, 1) = axis_angle({1, 0, 0}, 0.6);

  CHECK(joint_orientation_loss(source, source, chain, chain, field) == 0.0);

  // Mirror flip: conjugated shoulder rotation.
  Motion flipped = source;
  for (int t = 0; t < 2; ++t) flipped.rot(t, 1) = conjugate(source.rot(t, 1));
  double flip_loss = joint_orientation_loss(source, flipped, chain, chain, field);

  // A 5-degree perturbation barely moves the field.
  Motion nudged = source;
  for (int t = 0; t < 2; ++t) nudged.rot(t, 1) = axis_angle({1, 0, 0}, 0.6 + 5.0 * M_PI / 180.0);
  double nudge_loss = joint_orientation_loss(source, nudged, chain, chain, field);
  CHECK(flip_loss > nudge_loss * 10.0);

  // Translation never matters: directions ignore the global channel.
  Motion shifted = flipped;
  for (auto& dd : shifted.global) dd = {dd[0] + 3, dd[1] + 1, dd[2] - 2, dd[3]};
  CHECK(joint_orientation_loss(source, shifted, chain, chain, field) ==
        doctest::Approx(flip_loss).epsilon(1e-15));
}

TEST_CASE("total loss composition") {
  SceneSpec spec;
  spec.id = "slim_to_fat";
  spec.frames = 4;
  spec.density = 0.5;
  SceneAssets assets = generate_scene(spec);
  LimbSegmentation seg = segment_limbs(assets.target, assets.target.limbs);
  SampleCounts counts;
  counts.shape = 128;
  counts.limb_query = 60;
  counts.limb_reference = 400;
  PointSample sample = sample_points(assets.target, seg, counts, 11);
  JointOrientationField field = JointOrientationField::uniform(assets.target.skeleton.size());

  Motion retargeted = assets.motion;
  retargeted.rot(1, assets.target.skeleton.find("LeftForeArm")) = axis_angle({0, 0, 1}, 0.2);

  TotalLossInputs inputs;
  inputs.source = &assets.motion;
  inputs.source_skeleton = &assets.source.skeleton;
  inputs.retargeted = &retargeted;
  inputs.target_skeleton = &assets.target.skeleton;
  inputs.target_character = &assets.target;
  inputs.segmentation = &seg;
  inputs.sample = &sample;
  inputs.field = &field;
  inputs.threads = 1;

  LossWeights zero{0, 0, 0, 0, 0};
  LossReport none = total_loss(inputs, zero);
  CHECK(none.total == 0.0);
  CHECK(!none.rec.has_value());
  CHECK(!none.lp.has_value());

  LossWeights only_con{0, 0.7, 0, 0, 0};
  LossReport con_only = total_loss(inputs, only_con);
  CHECK(con_only.total ==
        doctest::Approx(0.7 * constraint_loss(assets.motion, retargeted, assets.target.skeleton))
            .epsilon(1e-12));
  CHECK(!con_only.tc.has_value());

  // Recomposition oracle with default weights.
  LossWeights defaults;
  LossReport full = total_loss(inputs, defaults);
  PenetrationOptions options;
  options.threads = 1;
  double hand = defaults.rec * reconstruction_loss(assets.motion, retargeted, assets.source.skeleton) +
                defaults.con * constraint_loss(assets.motion, retargeted, assets.target.skeleton) +
                defaults.lp * limb_penetration_loss(assets.target, seg, sample, retargeted, options).total +
                defaults.tc * temporal_consistency_loss(assets.motion, assets.source.skeleton,
                                                        retargeted, assets.target.skeleton) +
                defaults.j * joint_orientation_loss(assets.motion, retargeted, assets.source.skeleton,
                                                    assets.target.skeleton, field);
  CHECK(full.total == doctest::Approx(hand).epsilon(1e-12));

  // Linearity: doubling one weight doubles that contribution exactly.
  LossWeights doubled = defaults;
  doubled.lp *= 2.0;
  LossReport more = total_loss(inputs, doubled);
  CHECK(more.total - full.total == doctest::Approx(defaults.lp * *full.lp).epsilon(1e-12));
}
