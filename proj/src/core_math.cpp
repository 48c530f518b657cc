#include "retarget/core_math.hpp"

namespace retarget {

namespace {
constexpr double kUnitTol = 1e-9;
}

Quat quat_multiply(const Quat& a, const Quat& b) {
  Quat r = qmul_raw(a, b);
  if (std::abs(qnorm(a) - 1.0) <= kUnitTol && std::abs(qnorm(b) - 1.0) <= kUnitTol) {
    double n = qnorm(r);
    r = (1.0 / n) * r;
  }
  return r;
}

Vec3 quat_rotate(const Quat& q, const Vec3& v) {
  if (std::abs(qnorm(q) - 1.0) > 1e-6) throw DomainError("quat_rotate requires a unit quaternion");
  return rotate_vec(q, v);
}

Quat quat_normalize(const Quat& q) {
  double n = qnorm(q);
  if (n <= 1e-12) throw DomainError("cannot normalize degenerate quaternion");
  return canonical((1.0 / n) * q);
}

}  // namespace retarget
