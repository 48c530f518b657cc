#pragma once

#include <cmath>

#include "retarget/errors.hpp"

namespace retarget {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;
};

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
inline Vec3 operator*(double s, const Vec3& v) { return {s * v.x, s * v.y, s * v.z}; }
inline Vec3 operator*(const Vec3& v, double s) { return s * v; }
inline Vec3 operator/(const Vec3& v, double s) { return {v.x / s, v.y / s, v.z / s}; }
inline Vec3& operator+=(Vec3& a, const Vec3& b) { a.x += b.x; a.y += b.y; a.z += b.z; return a; }
inline Vec3& operator-=(Vec3& a, const Vec3& b) { a.x -= b.x; a.y -= b.y; a.z -= b.z; return a; }

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm2(const Vec3& v) { return dot(v, v); }
inline double norm(const Vec3& v) { return std::sqrt(norm2(v)); }

inline bool finite(const Vec3& v) {
  return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

// v / |v|; near-zero input is a domain error.
inline Vec3 normalize3(const Vec3& v) {
  double n = norm(v);
  if (n <= 1e-12) throw DomainError("cannot normalize near-zero vector");
  return v / n;
}

// Rotation quaternion, Hamilton convention, scalar part first.
struct Quat {
  double w = 1.0, x = 0.0, y = 0.0, z = 0.0;
};

inline Quat operator+(const Quat& a, const Quat& b) { return {a.w + b.w, a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Quat operator-(const Quat& a, const Quat& b) { return {a.w - b.w, a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Quat operator*(double s, const Quat& q) { return {s * q.w, s * q.x, s * q.y, s * q.z}; }
inline Quat& operator+=(Quat& a, const Quat& b) { a.w += b.w; a.x += b.x; a.y += b.y; a.z += b.z; return a; }

inline double qdot(const Quat& a, const Quat& b) { return a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z; }
inline double qnorm(const Quat& q) { return std::sqrt(qdot(q, q)); }
inline Quat conjugate(const Quat& q) { return {q.w, -q.x, -q.y, -q.z}; }

inline bool finite(const Quat& q) {
  return std::isfinite(q.w) && std::isfinite(q.x) && std::isfinite(q.y) && std::isfinite(q.z);
}

// Flips sign so the scalar part is nonnegative (picks one sheet of the double cover).
inline Quat canonical(const Quat& q) { return q.w < 0.0 ? Quat{-q.w, -q.x, -q.y, -q.z} : q; }

// Plain Hamilton product without renormalization; kernel for kinematic chains.
inline Quat qmul_raw(const Quat& a, const Quat& b) {
  return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
          a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
          a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
          a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

// Rotates v by q assuming unit q; polynomial in the components, no checks.
inline Vec3 rotate_vec(const Quat& q, const Vec3& v) {
  Vec3 u{q.x, q.y, q.z};
  Vec3 t = 2.0 * cross(u, v);
  return v + q.w * t + cross(u, t);
}

// Hamilton product; the result is renormalized when both inputs are unit.
Quat quat_multiply(const Quat& a, const Quat& b);

// Rotation of v by q; q must be unit within 1e-6.
Vec3 quat_rotate(const Quat& q, const Vec3& v);

// Unit-norm quaternion with the same direction, sign-canonicalized (w >= 0).
Quat quat_normalize(const Quat& q);

// ---- Derivative kernels -----------------------------------------------
// Each *_backward routine maps an upstream gradient through the matching
// forward kernel, treating quaternions as free 4-vectors.

inline void qmul_backward(const Quat& a, const Quat& b, const Quat& g, Quat& ga, Quat& gb) {
  ga.w += g.w * b.w + g.x * b.x + g.y * b.y + g.z * b.z;
  ga.x += -g.w * b.x + g.x * b.w - g.y * b.z + g.z * b.y;
  ga.y += -g.w * b.y + g.x * b.z + g.y * b.w - g.z * b.x;
  ga.z += -g.w * b.z - g.x * b.y + g.y * b.x + g.z * b.w;
  gb.w += g.w * a.w + g.x * a.x + g.y * a.y + g.z * a.z;
  gb.x += -g.w * a.x + g.x * a.w + g.y * a.z - g.z * a.y;
  gb.y += -g.w * a.y - g.x * a.z + g.y * a.w + g.z * a.x;
  gb.z += -g.w * a.z + g.x * a.y - g.y * a.x + g.z * a.w;
}

inline void rotate_vec_backward(const Quat& q, const Vec3& v, const Vec3& g, Quat& gq, Vec3& gv) {
  Vec3 u{q.x, q.y, q.z};
  Vec3 t = 2.0 * cross(u, v);
  Vec3 gt = q.w * g - cross(u, g);
  gq.w += dot(g, t);
  Vec3 gu = cross(t, g) + 2.0 * cross(v, gt);
  gq.x += gu.x;
  gq.y += gu.y;
  gq.z += gu.z;
  gv += g - 2.0 * cross(u, gt);
}

// Backward of q -> q/|q| evaluated at input q, given gradient at the output.
inline Quat qnormalize_backward(const Quat& q, const Quat& g) {
  double r = qnorm(q);
  Quat n = (1.0 / r) * q;
  double radial = qdot(n, g);
  return (1.0 / r) * Quat{g.w - radial * n.w, g.x - radial * n.x, g.y - radial * n.y, g.z - radial * n.z};
}

inline Vec3 vnormalize_backward(const Vec3& v, const Vec3& g) {
  double r = norm(v);
  Vec3 n = v / r;
  double radial = dot(n, g);
  return (g - radial * n) / r;
}

}  // namespace retarget
