#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "retarget/skeleton.hpp"

using namespace retarget;

namespace {

Skeleton chain(std::initializer_list<Vec3> offsets) {
  Skeleton s;
  int idx = 0;
  for (const Vec3& o : offsets) {
    s.joints.push_back({"j" + std::to_string(idx), idx - 1, o});
    ++idx;
  }
  return s;
}

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

}  // namespace

TEST_CASE("FK identity pose equals cumulative offsets") {
  Skeleton s = chain({{0, 0, 0}, {0, 1, 0}, {0, 0.5, 0}, {0.25, 0, 0}});
  Motion m = identity_motion(1, 4);
  Pose pose = forward_kinematics(s, m, 0);
  CHECK(norm(pose.positions[0] - Vec3{0, 0, 0}) == 0.0);
  CHECK(norm(pose.positions[1] - Vec3{0, 1, 0}) == 0.0);
  CHECK(norm(pose.positions[2] - Vec3{0, 1.5, 0}) == 0.0);
  CHECK(norm(pose.positions[3] - Vec3{0.25, 1.5, 0}) == 0.0);
}

TEST_CASE("FK two-joint chain with rotated root matches hand matrix chain") {
  // Root rotated 90 degrees about z; both offsets (0,1,0). The child offset
  // lands on (-1,0,0) after the parent rotation, and the tip doubles it.
  Skeleton s = chain({{0, 0, 0}, {0, 1, 0}, {0, 1, 0}});
  Motion m = identity_motion(1, 3);
  m.rot(0, 0) = axis_angle({0, 0, 1}, M_PI / 2);
  Pose pose = forward_kinematics(s, m, 0);
  CHECK(norm(pose.positions[1] - Vec3{-1, 0, 0}) < 1e-9);
  CHECK(norm(pose.positions[2] - Vec3{-2, 0, 0}) < 1e-9);

  // Bend the middle joint by 90 degrees about z as well: the tip turns again.
  m.rot(0, 1) = axis_angle({0, 0, 1}, M_PI / 2);
  pose = forward_kinematics(s, m, 0);
  CHECK(norm(pose.positions[1] - Vec3{-1, 0, 0}) < 1e-9);
  CHECK(norm(pose.positions[2] - Vec3{-1, -1, 0}) < 1e-9);
}

TEST_CASE("FK global translation shifts every joint") {
  Skeleton s = chain({{0, 0, 0}, {0, 1, 0}, {0.5, 0, 0}});
  Motion m = identity_motion(2, 3);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> uni(-1, 1);
  for (int t = 0; t < 2; ++t)
    for (int k = 0; k < 3; ++k) {
      Quat q{uni(rng) + 1.5, uni(rng), uni(rng), uni(rng)};
      m.rot(t, k) = quat_normalize(q);
    }
  Pose base = forward_kinematics(s, m, 1);
  m.global[1] = {5, 0, 0, 0};
  Pose shifted = forward_kinematics(s, m, 1);
  for (int k = 0; k < 3; ++k)
    CHECK(norm(shifted.positions[k] - (base.positions[k] + Vec3{5, 0, 0})) < 1e-12);
}

TEST_CASE("FK preserves bone lengths for random rotations") {
  Skeleton s = chain({{0, 0, 0}, {0, 0.8, 0}, {0.3, 0.1, 0}, {0, 0, 0.4}});
  Motion m = identity_motion(4, 4);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss;
  for (auto& q : m.rotations) q = quat_normalize(Quat{gauss(rng), gauss(rng), gauss(rng), gauss(rng)});
  for (int t = 0; t < 4; ++t) {
    Pose pose = forward_kinematics(s, m, t);
    for (int k = 1; k < 4; ++k) {
      double rest = norm(s.joints[k].offset);
      double posed = norm(pose.positions[k] - pose.positions[s.joints[k].parent]);
      CHECK(posed == doctest::Approx(rest).epsilon(1e-12));
    }
  }
}

TEST_CASE("FK shape and range errors") {
  Skeleton s = chain({{0, 0, 0}, {0, 1, 0}});
  Motion m = identity_motion(2, 3);
  CHECK_THROWS_AS(forward_kinematics(s, m, 0), ShapeError);
  Motion ok = identity_motion(2, 2);
  CHECK_THROWS_AS(forward_kinematics(s, ok, 2), DomainError);
  CHECK_THROWS_AS(forward_kinematics(s, ok, -1), DomainError);
}

TEST_CASE("character height") {
  Skeleton s = chain({{0, 0, 0}, {0, 1.0, 0}, {0, 0.8, 0}});
  CHECK(character_height(s) == doctest::Approx(1.8));

  Skeleton doubled = s;
  for (auto& j : doubled.joints) j.offset = 2.0 * j.offset;
  CHECK(character_height(doubled) == doctest::Approx(3.6));

  Skeleton single = chain({{0, 0, 0}});
  CHECK_THROWS_AS(character_height(single), DomainError);
}

TEST_CASE("orientation field propagation") {
  Skeleton s = chain({{0, 0, 0}, {0, 1, 0}, {0, 1, 0}});
  JointOrientationField field = JointOrientationField::uniform(3);
  Motion m = identity_motion(1, 3);
  auto dirs = propagate_orientation_field(s, m, field);
  for (const Vec3& d : dirs) CHECK(norm(d - Vec3{0, 0, 1}) < 1e-12);

  // 180-degree root turn about y flips the bound vector everywhere below.
  m.rot(0, 0) = axis_angle({0, 1, 0}, M_PI);
  dirs = propagate_orientation_field(s, m, field);
  for (const Vec3& d : dirs) CHECK(norm(d - Vec3{0, 0, -1}) < 1e-9);

  // Directions ignore global translation.
  m.global[0] = {3, -2, 9, 0};
  auto translated = propagate_orientation_field(s, m, field);
  for (size_t i = 0; i < dirs.size(); ++i) CHECK(norm(translated[i] - dirs[i]) == 0.0);

  // Unit norm is preserved under random motion.
  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss;
  for (auto& q : m.rotations) q = quat_normalize(Quat{gauss(rng), gauss(rng), gauss(rng), gauss(rng)});
  for (const Vec3& d : propagate_orientation_field(s, m, field))
    CHECK(std::abs(norm(d) - 1.0) < 1e-9);
}

TEST_CASE("skeleton validation") {
  Skeleton two_roots;
  two_roots.joints.push_back({"a", -1, {}});
  two_roots.joints.push_back({"b", -1, {}});
  CHECK_THROWS_AS(two_roots.validate(), DomainError);

  Skeleton bad_order;
  bad_order.joints.push_back({"a", -1, {}});
  bad_order.joints.push_back({"b", 1, {}});
  CHECK_THROWS_AS(bad_order.validate(), DomainError);
}
