#include "dfa/eig3.hpp"

#include <algorithm>
#include <cmath>

namespace dfa {

namespace {

Vec3 canonical_sign(const Vec3& v) {
  if (v.x != 0.0) return v.x > 0.0 ? v : -v;
  if (v.y != 0.0) return v.y > 0.0 ? v : -v;
  if (v.z != 0.0) return v.z > 0.0 ? v : -v;
  return v;
}

// Guarded Newton on p(x) = det(B - x I). Near multiple roots both p and p'
// sink into roundoff and the raw quotient is garbage, so steps are accepted
// only when small and strictly reducing |p|.
double polish_root(const Mat3& b, double x) {
  double c2 = -trace(b);
  double c1 = b(0, 0) * b(1, 1) + b(0, 0) * b(2, 2) + b(1, 1) * b(2, 2) -
              b(0, 1) * b(0, 1) - b(0, 2) * b(0, 2) - b(1, 2) * b(1, 2);
  double c0 = -det(b);
  auto eval = [&](double t) { return ((t + c2) * t + c1) * t + c0; };
  for (int it = 0; it < 2; ++it) {
    double p = eval(x);
    double dp = (3.0 * x + 2.0 * c2) * x + c1;
    if (dp == 0.0) break;
    double step = p / dp;
    if (!(std::fabs(step) < 1e-6 * (1.0 + std::fabs(x)))) break;
    double xn = x - step;
    if (std::fabs(eval(xn)) >= std::fabs(p)) break;
    x = xn;
  }
  return x;
}

Vec3 eigenvector_for(const Mat3& b, double lambda, double scale) {
  Mat3 m = b;
  m(0, 0) -= lambda;
  m(1, 1) -= lambda;
  m(2, 2) -= lambda;
  Vec3 c01 = cross(m.row(0), m.row(1));
  Vec3 c02 = cross(m.row(0), m.row(2));
  Vec3 c12 = cross(m.row(1), m.row(2));
  double n01 = norm2(c01), n02 = norm2(c02), n12 = norm2(c12);
  Vec3 best = c01;
  double nb = n01;
  if (n02 > nb) { best = c02; nb = n02; }
  if (n12 > nb) { best = c12; nb = n12; }
  if (nb <= scale * scale * 1e-24) return {0, 0, 0};  // (near-)repeated eigenvalue
  return best / std::sqrt(nb);
}

Vec3 any_unit_perpendicular(const Vec3& v) {
  int k = std::fabs(v.x) <= std::fabs(v.y)
              ? (std::fabs(v.x) <= std::fabs(v.z) ? 0 : 2)
              : (std::fabs(v.y) <= std::fabs(v.z) ? 1 : 2);
  Vec3 e{0, 0, 0};
  e[k] = 1.0;
  return normalized(e - dot(e, v) * v);
}

}  // namespace

SymmetricEigen3 eigen_symmetric(const Mat3& a, double degeneracy_rel_tol) {
  SymmetricEigen3 out;

  double scale = 0.0;
  for (double v : a.m) scale = std::max(scale, std::fabs(v));
  if (scale == 0.0) {
    out.values = {0, 0, 0};
    out.vectors = {Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}};
    out.degenerate = true;
    return out;
  }

  Mat3 b = a * (1.0 / scale);
  double p1 = b(0, 1) * b(0, 1) + b(0, 2) * b(0, 2) + b(1, 2) * b(1, 2);
  double q = trace(b) / 3.0;

  std::array<double, 3> ev;
  if (p1 == 0.0) {
    ev = {b(0, 0), b(1, 1), b(2, 2)};
  } else {
    double p2 = (b(0, 0) - q) * (b(0, 0) - q) + (b(1, 1) - q) * (b(1, 1) - q) +
                (b(2, 2) - q) * (b(2, 2) - q) + 2.0 * p1;
    double p = std::sqrt(p2 / 6.0);
    Mat3 c = (b - Mat3::diagonal(q, q, q)) * (1.0 / p);
    double r = std::clamp(det(c) / 2.0, -1.0, 1.0);
    double phi = std::acos(r) / 3.0;
    ev[0] = q + 2.0 * p * std::cos(phi);
    ev[2] = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
    ev[1] = 3.0 * q - ev[0] - ev[2];
    for (double& e : ev) e = polish_root(b, e);
  }
  std::sort(ev.begin(), ev.end(), std::greater<>());

  double vmax = std::max({std::fabs(ev[0]), std::fabs(ev[1]), std::fabs(ev[2]), 1e-300});
  out.degenerate = (ev[0] - ev[1]) < degeneracy_rel_tol * vmax ||
                   (ev[1] - ev[2]) < degeneracy_rel_tol * vmax;

  std::array<Vec3, 3> vec;
  for (int i = 0; i < 3; ++i) vec[i] = eigenvector_for(b, ev[i], 1.0);

  // Fill in eigenvectors lost to (near-)repeated eigenvalues by orthogonal
  // completion against whichever ones were recovered.
  int have = -1;
  for (int i = 0; i < 3; ++i)
    if (norm2(vec[i]) > 0.5) { have = i; break; }
  if (have < 0) {
    vec = {Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}};
  } else {
    for (int i = 0; i < 3; ++i) {
      if (norm2(vec[i]) > 0.5) continue;
      Vec3 v = any_unit_perpendicular(vec[have]);
      for (int j = 0; j < 3; ++j)
        if (j != i && norm2(vec[j]) > 0.5) v -= dot(v, vec[j]) * vec[j];
      if (norm(v) < 1e-8) v = cross(vec[have], any_unit_perpendicular(vec[have]));
      vec[i] = normalized(v);
    }
  }

  // Gram-Schmidt pass keeps the triple orthonormal under near-degeneracy.
  vec[0] = normalized(vec[0]);
  vec[1] = normalized(vec[1] - dot(vec[1], vec[0]) * vec[0]);
  if (norm2(vec[1]) < 0.5) vec[1] = any_unit_perpendicular(vec[0]);
  vec[2] = cross(vec[0], vec[1]);

  for (int i = 0; i < 3; ++i) {
    out.values[i] = ev[i] * scale;
    out.vectors[i] = canonical_sign(vec[i]);
  }
  return out;
}

}  // namespace dfa
