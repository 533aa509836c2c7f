#include "dfa/tfa.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace dfa::tfa {

Mat3 tensor_at(const FloatVolume& vol, int i, int j, int k) {
  const float* p = vol.at(i, j, k);
  Mat3 D;
  D(0, 0) = p[0]; D(0, 1) = p[1]; D(0, 2) = p[2];
  D(1, 0) = p[1]; D(1, 1) = p[3]; D(1, 2) = p[4];
  D(2, 0) = p[2]; D(2, 1) = p[4]; D(2, 2) = p[5];
  return D;
}

void set_tensor(FloatVolume& vol, int i, int j, int k, const Mat3& D) {
  float* p = vol.at(i, j, k);
  p[0] = static_cast<float>(D(0, 0));
  p[1] = static_cast<float>(D(0, 1));
  p[2] = static_cast<float>(D(0, 2));
  p[3] = static_cast<float>(D(1, 1));
  p[4] = static_cast<float>(D(1, 2));
  p[5] = static_cast<float>(D(2, 2));
}

TensorGradient tensor_gradient(const FloatVolume& vol, int i, int j, int k) {
  expect_tag(vol.tag, VolumeKind::tensor6, "tensor gradient");
  auto clamp = [](int v, int hi) { return v < 0 ? 0 : (v >= hi ? hi - 1 : v); };
  TensorGradient out;
  const std::array<int, 3> at{i, j, k};
  for (int c = 0; c < 3; ++c) {
    std::array<int, 3> fw = at, bw = at;
    fw[c] = clamp(at[c] + 1, vol.dims[c]);
    bw[c] = clamp(at[c] - 1, vol.dims[c]);
    Mat3 f = tensor_at(vol, fw[0], fw[1], fw[2]);
    Mat3 b = tensor_at(vol, bw[0], bw[1], bw[2]);
    double h = (fw[c] - bw[c]) * vol.spacing[c];
    out.g[c] = h > 0 ? (f - b) * (1.0 / h) : Mat3::zero();
  }
  return out;
}

Vec3 project_gradient_to_vector(const Mat3& W, const TensorGradient& grad) {
  Vec3 out;
  for (int c = 0; c < 3; ++c) {
    double s = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) s += W(i, j) * grad.g[c](i, j);
    out[c] = s;
  }
  return out;
}

double project_gradient_to_scalar(const Mat3& W, const TensorGradient& grad, const Vec3& v) {
  return dot(project_gradient_to_vector(W, grad), v);
}

Mat3 rotation_tangent(const Mat3& D, int p, double degeneracy_rel_tol) {
  if (p < 0 || p > 2) throw std::invalid_argument("rotation_tangent: p out of range");
  SymmetricEigen3 e = eigen_symmetric(D, degeneracy_rel_tol);
  double scale = std::max({std::fabs(e.values[0]), std::fabs(e.values[2]), 1e-300});
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b)
      if (std::fabs(e.values[a] - e.values[b]) < degeneracy_rel_tol * scale)
        throw std::invalid_argument("rotation_tangent: degenerate tangent (repeated eigenvalues)");
  Mat3 G = skew(e.vectors[p]);
  return G * D - D * G;
}

namespace {

constexpr int kPairs[6][2] = {{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}};

int pair_index(int i, int j) {
  static constexpr int lut[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};
  return lut[i][j];
}

}  // namespace

double StructureTensor4::at(int i, int j, int k, int l) const {
  return m[pair_index(i, j)][pair_index(k, l)];
}

double StructureTensor4::contract(const Mat3& W, const Vec3& v) const {
  double s = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) s += W(i, j) * v[k] * v[l] * at(i, j, k, l);
  return s;
}

StructureTensor4 structure_tensor_4(const TensorGradient& grad) {
  StructureTensor4 out;
  for (int r = 0; r < 6; ++r) {
    int i = kPairs[r][0], j = kPairs[r][1];
    for (int c = 0; c < 6; ++c) {
      int k = kPairs[c][0], l = kPairs[c][1];
      out.m[r][c] = grad.g[k](i, j) * grad.g[l](i, j);
    }
  }
  return out;
}

StructureSpectrum structure_tensor_spectrum(const StructureTensor4& t) {
  Eigen::Matrix<double, 6, 6> m;
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 6; ++c) m(r, c) = t.m[r][c];
  Eigen::EigenSolver<Eigen::Matrix<double, 6, 6>> solver(m, false);
  StructureSpectrum out;
  for (int i = 0; i < 6; ++i) {
    out.eigenvalues[i] = solver.eigenvalues()(i);
    if (std::fabs(out.eigenvalues[i].imag()) > 1e-12 * (1.0 + std::abs(out.eigenvalues[i])))
      out.has_complex = true;
  }
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end(),
            [](const std::complex<double>& a, const std::complex<double>& b) {
              return std::abs(a) > std::abs(b);
            });
  return out;
}

double fractional_anisotropy(const std::array<double, 3>& ev) {
  double mean = (ev[0] + ev[1] + ev[2]) / 3.0;
  double num = 0, den = 0;
  for (double l : ev) {
    num += (l - mean) * (l - mean);
    den += l * l;
  }
  if (den <= 0) return 0.0;
  return std::sqrt(1.5 * num / den);
}

double fractional_anisotropy(const Mat3& D) {
  return fractional_anisotropy(eigen_symmetric(D).values);
}

double tensor_mode(const Mat3& D) {
  double md = trace(D) / 3.0;
  Mat3 dev = D - Mat3::diagonal(md, md, md);
  double n = frobenius_norm(dev);
  if (n <= 0) return 0.0;
  return 3.0 * std::sqrt(6.0) * det(dev * (1.0 / n));
}

}  // namespace dfa::tfa
