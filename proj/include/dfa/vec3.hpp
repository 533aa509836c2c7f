#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace dfa {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
  double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator-() const { return {-x, -y, -z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
  Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }

  bool operator==(const Vec3& o) const { return x == o.x && y == o.y && z == o.z; }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm2(const Vec3& v) { return dot(v, v); }
inline double norm(const Vec3& v) { return std::sqrt(norm2(v)); }

inline Vec3 normalized(const Vec3& v) {
  double n = norm(v);
  return n > 0.0 ? v / n : Vec3{0, 0, 0};
}

// Row-major 3x3 matrix.
struct Mat3 {
  std::array<double, 9> m{};

  double& operator()(int r, int c) { return m[3 * r + c]; }
  double operator()(int r, int c) const { return m[3 * r + c]; }

  static Mat3 identity() {
    Mat3 I;
    I.m = {1, 0, 0, 0, 1, 0, 0, 0, 1};
    return I;
  }

  static Mat3 zero() { return Mat3{}; }

  static Mat3 diagonal(double a, double b, double c) {
    Mat3 D;
    D(0, 0) = a; D(1, 1) = b; D(2, 2) = c;
    return D;
  }

  Vec3 row(int r) const { return {m[3 * r], m[3 * r + 1], m[3 * r + 2]}; }
  Vec3 col(int c) const { return {m[c], m[3 + c], m[6 + c]}; }

  Mat3 operator+(const Mat3& o) const {
    Mat3 r;
    for (int i = 0; i < 9; ++i) r.m[i] = m[i] + o.m[i];
    return r;
  }
  Mat3 operator-(const Mat3& o) const {
    Mat3 r;
    for (int i = 0; i < 9; ++i) r.m[i] = m[i] - o.m[i];
    return r;
  }
  Mat3 operator*(double s) const {
    Mat3 r;
    for (int i = 0; i < 9; ++i) r.m[i] = m[i] * s;
    return r;
  }
  Mat3& operator+=(const Mat3& o) {
    for (int i = 0; i < 9; ++i) m[i] += o.m[i];
    return *this;
  }

  bool operator==(const Mat3& o) const { return m == o.m; }
};

inline Mat3 operator*(double s, const Mat3& a) { return a * s; }

inline Vec3 operator*(const Mat3& a, const Vec3& v) {
  return {a.m[0] * v.x + a.m[1] * v.y + a.m[2] * v.z,
          a.m[3] * v.x + a.m[4] * v.y + a.m[5] * v.z,
          a.m[6] * v.x + a.m[7] * v.y + a.m[8] * v.z};
}

inline Mat3 operator*(const Mat3& a, const Mat3& b) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0;
      for (int k = 0; k < 3; ++k) s += a(i, k) * b(k, j);
      r(i, j) = s;
    }
  return r;
}

inline Mat3 transpose(const Mat3& a) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = a(j, i);
  return r;
}

inline Mat3 outer(const Vec3& a, const Vec3& b) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = a[i] * b[j];
  return r;
}

inline double trace(const Mat3& a) { return a.m[0] + a.m[4] + a.m[8]; }

inline double det(const Mat3& a) {
  return a.m[0] * (a.m[4] * a.m[8] - a.m[5] * a.m[7]) -
         a.m[1] * (a.m[3] * a.m[8] - a.m[5] * a.m[6]) +
         a.m[2] * (a.m[3] * a.m[7] - a.m[4] * a.m[6]);
}

// Adjugate-based inverse; caller is responsible for non-singular input.
inline Mat3 inverse(const Mat3& a) {
  Mat3 r;
  double d = det(a);
  r(0, 0) = (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) / d;
  r(0, 1) = (a(0, 2) * a(2, 1) - a(0, 1) * a(2, 2)) / d;
  r(0, 2) = (a(0, 1) * a(1, 2) - a(0, 2) * a(1, 1)) / d;
  r(1, 0) = (a(1, 2) * a(2, 0) - a(1, 0) * a(2, 2)) / d;
  r(1, 1) = (a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0)) / d;
  r(1, 2) = (a(0, 2) * a(1, 0) - a(0, 0) * a(1, 2)) / d;
  r(2, 0) = (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0)) / d;
  r(2, 1) = (a(0, 1) * a(2, 0) - a(0, 0) * a(2, 1)) / d;
  r(2, 2) = (a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0)) / d;
  return r;
}

inline double frobenius_norm(const Mat3& a) {
  double s = 0;
  for (double v : a.m) s += v * v;
  return std::sqrt(s);
}

inline Mat3 skew(const Vec3& a) {
  Mat3 s;
  s(0, 1) = -a.z; s(0, 2) = a.y;
  s(1, 0) = a.z;  s(1, 2) = -a.x;
  s(2, 0) = -a.y; s(2, 1) = a.x;
  return s;
}

// Rodrigues rotation about a unit axis.
inline Mat3 axis_angle_rotation(const Vec3& unit_axis, double angle) {
  double c = std::cos(angle), s = std::sin(angle);
  Mat3 K = skew(unit_axis);
  Mat3 R = Mat3::identity() + s * K + (1.0 - c) * (K * K);
  return R;
}

// Proper rotation taking unit vector `from` to unit vector `to` about their
// common normal. Antiparallel inputs rotate by pi about a deterministic
// perpendicular axis.
inline Mat3 rotation_between_unit(const Vec3& from, const Vec3& to) {
  Vec3 ax = cross(from, to);
  double s = norm(ax);
  double c = dot(from, to);
  if (s < 1e-15) {
    if (c >= 0.0) return Mat3::identity();
    int k = std::fabs(from.x) <= std::fabs(from.y)
                ? (std::fabs(from.x) <= std::fabs(from.z) ? 0 : 2)
                : (std::fabs(from.y) <= std::fabs(from.z) ? 1 : 2);
    Vec3 e{0, 0, 0};
    e[k] = 1.0;
    Vec3 p = normalized(e - dot(e, from) * from);
    return axis_angle_rotation(p, std::numbers::pi);
  }
  double angle = std::atan2(s, c);
  return axis_angle_rotation(ax / s, angle);
}

inline double rotation_angle(const Mat3& R) {
  double c = std::clamp((trace(R) - 1.0) / 2.0, -1.0, 1.0);
  return std::acos(c);
}

// Log map of a rotation as axis*angle.
inline Vec3 rotation_log(const Mat3& R) {
  double angle = rotation_angle(R);
  if (angle < 1e-12) return {0, 0, 0};
  Vec3 w{R(2, 1) - R(1, 2), R(0, 2) - R(2, 0), R(1, 0) - R(0, 1)};
  double s = norm(w);
  if (s < 1e-12) {
    // angle near pi: recover the axis from the symmetric part
    Vec3 a{std::sqrt(std::max(0.0, (R(0, 0) + 1.0) / 2.0)),
           std::sqrt(std::max(0.0, (R(1, 1) + 1.0) / 2.0)),
           std::sqrt(std::max(0.0, (R(2, 2) + 1.0) / 2.0))};
    if (a.x >= a.y && a.x >= a.z) {
      a.y = R(0, 1) / (2.0 * a.x);
      a.z = R(0, 2) / (2.0 * a.x);
    } else if (a.y >= a.z) {
      a.x = R(0, 1) / (2.0 * a.y);
      a.z = R(1, 2) / (2.0 * a.y);
    } else {
      a.x = R(0, 2) / (2.0 * a.z);
      a.y = R(1, 2) / (2.0 * a.z);
    }
    return normalized(a) * angle;
  }
  return w * (angle / s);
}

inline Mat3 rotation_exp(const Vec3& w) {
  double angle = norm(w);
  if (angle < 1e-300) return Mat3::identity();
  return axis_angle_rotation(w / angle, angle);
}

// Geodesic mean of two rotations (closed form for the two-element case).
inline Mat3 rotation_mean(const Mat3& a, const Mat3& b) {
  return a * rotation_exp(0.5 * rotation_log(transpose(a) * b));
}

// Rescale the rotation angle, keeping the axis.
inline Mat3 rotation_scale_angle(const Mat3& R, double factor) {
  return rotation_exp(rotation_log(R) * factor);
}

}  // namespace dfa
