#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "retarget/core_math.hpp"

using namespace retarget;

namespace {

// 3x3 rotation matrix oracle, independent of the quaternion kernels.
struct Mat3 {
  double m[3][3];
};

Mat3 mat_from_quat(const Quat& q) {
  double w = q.w, x = q.x, y = q.y, z = q.z;
  return {{{1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)},
           {2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)},
           {2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)}}};
}

Mat3 mat_mul(const Mat3& a, const Mat3& b) {
  Mat3 r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) r.m[i][j] += a.m[i][k] * b.m[k][j];
  return r;
}

Vec3 mat_apply(const Mat3& a, const Vec3& v) {
  return {a.m[0][0] * v.x + a.m[0][1] * v.y + a.m[0][2] * v.z,
          a.m[1][0] * v.x + a.m[1][1] * v.y + a.m[1][2] * v.z,
          a.m[2][0] * v.x + a.m[2][1] * v.y + a.m[2][2] * v.z};
}

Quat random_unit_quat(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Quat q{gauss(rng), gauss(rng), gauss(rng), gauss(rng)};
  return quat_normalize(q);
}

Vec3 random_vec(std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> uni(-scale, scale);
  return {uni(rng), uni(rng), uni(rng)};
}

bool near(const Vec3& a, const Vec3& b, double tol) { return norm(a - b) <= tol; }

}  // namespace

TEST_CASE("quat_multiply identity and inverse") {
  Quat q = quat_normalize(Quat{0.3, -0.5, 0.7, 0.2});
  Quat r = quat_multiply(Quat{1, 0, 0, 0}, q);
  CHECK(r.w == doctest::Approx(q.w).epsilon(1e-12));
  CHECK(r.x == doctest::Approx(q.x).epsilon(1e-12));

  Quat inv = quat_multiply(q, conjugate(q));
  CHECK(inv.w == doctest::Approx(1.0));
  CHECK(std::abs(inv.x) < 1e-12);
  CHECK(std::abs(inv.y) < 1e-12);
  CHECK(std::abs(inv.z) < 1e-12);
}

TEST_CASE("quat_multiply 180x then 180y composes to 180z (matrix oracle)") {
  Quat qx{0, 1, 0, 0};
  Quat qy{0, 0, 1, 0};
  Quat composed = quat_multiply(qx, qy);
  Mat3 oracle = mat_mul(mat_from_quat(qx), mat_from_quat(qy));
  Mat3 got = mat_from_quat(composed);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(got.m[i][j] == doctest::Approx(oracle.m[i][j]).epsilon(1e-12));
  // Up to sign, the result is the 180-degree z rotation.
  CHECK(std::abs(composed.w) < 1e-12);
  CHECK(std::abs(std::abs(composed.z) - 1.0) < 1e-12);
}

TEST_CASE("quat_rotate basics") {
  Vec3 v{1, 2, 3};
  CHECK(near(quat_rotate(Quat{1, 0, 0, 0}, v), v, 0.0));

  Quat rot90z = quat_normalize(Quat{std::cos(M_PI / 4), 0, 0, std::sin(M_PI / 4)});
  Vec3 r = quat_rotate(rot90z, Vec3{1, 0, 0});
  CHECK(near(r, Vec3{0, 1, 0}, 1e-12));
  // Matrix oracle agrees.
  CHECK(near(mat_apply(mat_from_quat(rot90z), Vec3{1, 0, 0}), r, 1e-12));

  CHECK(near(quat_rotate(rot90z, Vec3{}), Vec3{}, 0.0));
  CHECK_THROWS_AS(quat_rotate(Quat{2, 0, 0, 0}, v), DomainError);
}

TEST_CASE("quat_normalize") {
  Quat a = quat_normalize(Quat{2, 0, 0, 0});
  CHECK(a.w == doctest::Approx(1.0));
  Quat b = quat_normalize(Quat{-1, 0, 0, 0});
  CHECK(b.w == doctest::Approx(1.0));  // sign canonicalized
  Quat c = quat_normalize(Quat{1, 1, 1, 1});
  CHECK(c.w == doctest::Approx(0.5));
  CHECK(c.x == doctest::Approx(0.5));
  CHECK(c.y == doctest::Approx(0.5));
  CHECK(c.z == doctest::Approx(0.5));
  CHECK_THROWS_AS(quat_normalize(Quat{0, 0, 0, 0}), DomainError);
}

TEST_CASE("algebraic properties on random unit quaternions") {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 500; ++i) {
    Quat a = random_unit_quat(rng);
    Quat b = random_unit_quat(rng);
    Quat c = random_unit_quat(rng);
    Vec3 v = random_vec(rng, 2.0);

    Quat ab_c = quat_multiply(quat_multiply(a, b), c);
    Quat a_bc = quat_multiply(a, quat_multiply(b, c));
    CHECK(std::abs(ab_c.w - a_bc.w) < 1e-9);
    CHECK(std::abs(ab_c.x - a_bc.x) < 1e-9);
    CHECK(std::abs(ab_c.y - a_bc.y) < 1e-9);
    CHECK(std::abs(ab_c.z - a_bc.z) < 1e-9);

    CHECK(near(quat_rotate(quat_multiply(a, b), v), quat_rotate(a, quat_rotate(b, v)), 1e-9));
    CHECK(std::abs(norm(quat_rotate(a, v)) - norm(v)) <= 1e-9 * std::max(1.0, norm(v)));
  }
}

TEST_CASE("derivative kernels match finite differences") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss;
  const double h = 1e-6;

  for (int trial = 0; trial < 50; ++trial) {
    Quat a{gauss(rng), gauss(rng), gauss(rng), gauss(rng)};
    Quat b{gauss(rng), gauss(rng), gauss(rng), gauss(rng)};
    Quat g{gauss(rng), gauss(rng), gauss(rng), gauss(rng)};
    Vec3 v = random_vec(rng, 2.0);
    Vec3 g3 = random_vec(rng);

    // qmul
    Quat ga{0, 0, 0, 0}, gb{0, 0, 0, 0};
    qmul_backward(a, b, g, ga, gb);
    double* pa = &a.w;
    const double* pga = &ga.w;
    for (int c = 0; c < 4; ++c) {
      double save = pa[c];
      pa[c] = save + h;
      Quat plus = qmul_raw(a, b);
      pa[c] = save - h;
      Quat minus = qmul_raw(a, b);
      pa[c] = save;
      double fd = (qdot(plus, g) - qdot(minus, g)) / (2 * h);
      CHECK(fd == doctest::Approx(pga[c]).epsilon(1e-5).scale(1.0));
    }

    // rotate_vec w.r.t. q and v
    Quat gq{0, 0, 0, 0};
    Vec3 gv{};
    rotate_vec_backward(a, v, g3, gq, gv);
    const double* pgq = &gq.w;
    for (int c = 0; c < 4; ++c) {
      double save = pa[c];
      pa[c] = save + h;
      Vec3 plus = rotate_vec(a, v);
      pa[c] = save - h;
      Vec3 minus = rotate_vec(a, v);
      pa[c] = save;
      double fd = (dot(plus, g3) - dot(minus, g3)) / (2 * h);
      CHECK(fd == doctest::Approx(pgq[c]).epsilon(1e-5).scale(1.0));
    }
    double* pv = &v.x;
    const double* pgv = &gv.x;
    for (int c = 0; c < 3; ++c) {
      double save = pv[c];
      pv[c] = save + h;
      Vec3 plus = rotate_vec(a, v);
      pv[c] = save - h;
      Vec3 minus = rotate_vec(a, v);
      pv[c] = save;
      double fd = (dot(plus, g3) - dot(minus, g3)) / (2 * h);
      CHECK(fd == doctest::Approx(pgv[c]).epsilon(1e-5).scale(1.0));
    }

    // normalize backward
    Quat gn = qnormalize_backward(a, g);
    const double* pgn = &gn.w;
    for (int c = 0; c < 4; ++c) {
      double save = pa[c];
      pa[c] = save + h;
      Quat plus = (1.0 / qnorm(a)) * a;
      pa[c] = save - h;
      Quat minus = (1.0 / qnorm(a)) * a;
      pa[c] = save;
      double fd = (qdot(plus, g) - qdot(minus, g)) / (2 * h);
      CHECK(fd == doctest::Approx(pgn[c]).epsilon(1e-4).scale(1.0));
    }
  }
}
