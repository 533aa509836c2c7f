#include "dfa/order.hpp"

#include <cmath>
#include <stdexcept>

#include "dfa/eig3.hpp"
#include "dfa/parallel.hpp"

namespace dfa::order {

namespace {

// Frozen linear map from the six l <= 2 real SH coefficients
// [c00, c2-2, c2-1, c20, c21, c22] to the six unique entries of the
// orientational tensor. Derived once by high-order quadrature (see the
// regeneration test in test_order).
constexpr double kQc00 = 1.1816359006036774;   // sqrt(4 pi)/3
constexpr double kQc20 = 1.0568872793616030;   // (2/3) sqrt(4 pi / 5)
constexpr double kQoff = 0.91529123286551084;  // sqrt(4 pi / 15)

}  // namespace

Mat3 orientational_tensor(const sh::SHCoefficients& f) {
  double c00 = f.c.empty() ? 0.0 : f.c[0];
  double c2m2 = 0, c2m1 = 0, c20 = 0, c21 = 0, c22 = 0;
  if (f.max_order >= 2) {
    c2m2 = f.at(2, -2);
    c2m1 = f.at(2, -1);
    c20 = f.at(2, 0);
    c21 = f.at(2, 1);
    c22 = f.at(2, 2);
  }
  Mat3 q;
  q(0, 0) = kQc00 * c00 - 0.5 * kQc20 * c20 + kQoff * c2m2;
  q(1, 1) = kQc00 * c00 - 0.5 * kQc20 * c20 - kQoff * c2m2;
  q(2, 2) = kQc00 * c00 + kQc20 * c20;
  q(0, 1) = q(1, 0) = kQoff * c22;
  q(0, 2) = q(2, 0) = -kQoff * c2m1;
  q(1, 2) = q(2, 1) = -kQoff * c21;
  return q;
}

double oo(const sh::SHCoefficients& f, const Vec3& axis) {
  Mat3 q = orientational_tensor(f);
  double total = std::sqrt(4.0 * std::numbers::pi) * (f.c.empty() ? 0.0 : f.c[0]);
  Vec3 n = normalized(axis);
  return 1.5 * dot(n, q * n) - 0.5 * total;
}

double oo_quadrature(const sh::SHCoefficients& f, const Vec3& axis,
                     const SphereQuadrature& quad) {
  Vec3 n = normalized(axis);
  return quad.integrate([&](const Vec3& u) {
    double t = dot(u, n);
    return 0.5 * (3.0 * t * t - 1.0) * sh::eval(f, u);
  });
}

OOResult oo_od(const sh::SHCoefficients& f, const Vec3& axis) {
  OOResult out;
  out.axis = canonical_director(normalized(axis));
  out.oo = oo(f, out.axis);
  out.od = 1.0 - out.oo;
  return out;
}

double oo_sh_path(const sh::SHCoefficients& f, const Vec3& axis) {
  // Restrict to the l <= 2 block, rotate the axis onto z, read a_{2,0}.
  sh::SHCoefficients low = sh::SHCoefficients::zeros(std::min(f.max_order, 2));
  for (std::size_t i = 0; i < low.c.size() && i < f.c.size(); ++i) low.c[i] = f.c[i];
  Vec3 n = normalized(axis);
  Mat3 R = rotation_between_unit(n, {0, 0, 1});
  sh::SHCoefficients rotated = sh::rotate(low, R);
  double a20 = rotated.max_order >= 2 ? rotated.at(2, 0) : 0.0;
  return std::sqrt(4.0 * std::numbers::pi / 5.0) * a20;
}

double oo_axisymmetric(double a2, double phi) {
  return (1.0 + 3.0 * std::cos(2.0 * phi)) / 4.0 * (2.0 * std::numbers::pi * a2);
}

double dawson(double x) {
  double ax = std::fabs(x);
  double result;
  if (ax < 0.5) {
    // Maclaurin series: sum (-2)^k x^(2k+1) / (2k+1)!!
    double term = ax;
    double sum = ax;
    double x2 = ax * ax;
    for (int k = 1; k < 40; ++k) {
      term *= -2.0 * x2 / (2.0 * k + 1.0);
      sum += term;
      if (std::fabs(term) < 1e-18 * std::fabs(sum)) break;
    }
    result = sum;
  } else {
    // Sampling-theorem evaluation (Rybicki): spacing h = 0.2 keeps the
    // truncation error near exp(-(pi/(2h))^2), far below 1e-12.
    const double h = 0.2;
    const int n0 = 2 * static_cast<int>(std::lround(0.5 * ax / h)) + 1;  // odd
    double sum = 0.0;
    for (int n = n0 - 60; n <= n0 + 60; n += 2) {
      double d = ax - n * h;
      sum += std::exp(-d * d) / n;
    }
    result = sum / std::sqrt(std::numbers::pi);
  }
  return x < 0.0 ? -result : result;
}

double oo_watson(double kappa) {
  if (kappa <= 0.0) throw std::invalid_argument("oo_watson: kappa must be positive");
  if (kappa < 1e-6) return 2.0 * kappa / 15.0 + 4.0 * kappa * kappa / 315.0;
  double sk = std::sqrt(kappa);
  return 3.0 / (4.0 * sk * dawson(sk)) - (3.0 + 2.0 * kappa) / (4.0 * kappa);
}

double od_watson(double kappa) { return 1.0 - oo_watson(kappa); }

double od_w(double kappa) {
  if (kappa <= 0.0) throw std::invalid_argument("od_w: kappa must be positive");
  return 2.0 / std::numbers::pi * std::atan(1.0 / kappa);
}

double oo_prolate_tensor(double l1, double l2) {
  if (l2 <= 0.0) throw std::invalid_argument("oo_prolate_tensor: eigenvalues must be positive");
  if (l1 < l2)
    throw std::invalid_argument("oo_prolate_tensor: oblate not covered by the closed form");
  double ratio = l1 / l2;
  if (ratio < 1.0 + 1e-6) return (ratio - 1.0) / 5.0;  // removable singularity
  double diff = l1 - l2;
  double num = std::sqrt(diff) * (2.0 * l1 + l2) -
               3.0 * l1 * std::sqrt(l2) * std::atan(std::sqrt(diff / l2));
  return num / (2.0 * std::pow(diff, 1.5));
}

double oo_upper_bound(double gfa, double c00) {
  if (gfa < 0.0 || gfa >= 1.0) throw std::invalid_argument("oo_upper_bound: gfa must be in [0,1)");
  return std::sqrt(4.0 * std::numbers::pi * c00 * c00 / 5.0) *
         std::sqrt(1.0 / (1.0 - gfa * gfa) - 1.0);
}

OOFunction oo_mixture(std::span<const std::pair<double, OOFunction>> components) {
  double wsum = 0.0;
  for (const auto& [w, f] : components) wsum += w;
  if (std::fabs(wsum - 1.0) > 1e-9)
    throw std::invalid_argument("oo_mixture: weights must sum to 1");
  std::vector<std::pair<double, OOFunction>> copy(components.begin(), components.end());
  return [copy](const Vec3& n) {
    double s = 0.0;
    for (const auto& [w, f] : copy) s += w * f(n);
    return s;
  };
}

RegionTensorResult region_orientational_tensor(const FloatVolume& sh_volume,
                                               std::span<const std::array<int, 3>> region,
                                               std::span<const double> weights) {
  expect_tag(sh_volume.tag, VolumeKind::sh, "region orientational tensor");
  if (region.empty()) throw std::invalid_argument("region_orientational_tensor: empty region");
  if (!weights.empty() && weights.size() != region.size())
    throw std::invalid_argument("region_orientational_tensor: weight count mismatch");

  double wsum = 0.0;
  for (std::size_t i = 0; i < region.size(); ++i) {
    double w = weights.empty() ? 1.0 : weights[i];
    if (w < 0.0 || !std::isfinite(w))
      throw std::invalid_argument("region_orientational_tensor: weights must be finite and >= 0");
    wsum += w;
  }
  if (wsum <= 0.0)
    throw std::invalid_argument("region_orientational_tensor: zero total weight");

  Mat3 q;
  for (std::size_t i = 0; i < region.size(); ++i) {
    double w = (weights.empty() ? 1.0 : weights[i]) / wsum;
    auto [vi, vj, vk] = region[i];
    q += orientational_tensor(sh_at_voxel(sh_volume, vi, vj, vk)) * w;
  }

  RegionTensorResult out;
  out.tensor = q;
  SymmetricEigen3 e = eigen_symmetric(q);
  int top = std::fabs(e.values[0]) >= std::fabs(e.values[2]) ? 0 : 2;
  int other = top == 0 ? 2 : 0;
  int second = std::fabs(e.values[1]) >= std::fabs(e.values[other]) ? 1 : other;
  out.main_axis = e.vectors[top];
  out.main_value = e.values[top];
  double ref = std::max(std::fabs(e.values[top]), 1e-30);
  out.degenerate = std::fabs(std::fabs(e.values[top]) - std::fabs(e.values[second])) < 1e-8 * ref;
  return out;
}

namespace {

void oo_od_at_voxel(const FloatVolume& vol, double gfa_threshold, OOMaps& maps,
                    std::int64_t v) {
  int nx = vol.dims[0], ny = vol.dims[1];
  int i = static_cast<int>(v % nx);
  int j = static_cast<int>((v / nx) % ny);
  int k = static_cast<int>(v / (static_cast<std::int64_t>(nx) * ny));

  sh::SHCoefficients c = sh_at_voxel(vol, i, j, k);
  sh::PeakOptions opts;
  opts.gfa_threshold = gfa_threshold;
  std::vector<WeightedDirector> peaks = sh::detect_peaks(c, opts);

  float oo_value = 0.0f;
  std::uint8_t ok = 0;
  if (!peaks.empty()) {
    oo_value = static_cast<float>(oo_sh_path(c, peaks.front().axis));
    ok = 1;
  }
  float od_value = 1.0f - oo_value;  // exact complement at storage precision
  *maps.oo.at(i, j, k) = oo_value;
  *maps.od.at(i, j, k) = od_value;
  *maps.valid.at(i, j, k) = ok;
}

OOMaps make_oo_maps(const FloatVolume& vol) {
  OOMaps maps;
  maps.oo.allocate(vol.dims, 1, {VolumeKind::scalar, 0}, vol.spacing);
  maps.od.allocate(vol.dims, 1, {VolumeKind::scalar, 0}, vol.spacing);
  maps.valid.allocate(vol.dims, 1, {VolumeKind::mask, 0}, vol.spacing);
  return maps;
}

}  // namespace

OOMaps oo_od_maps(const FloatVolume& sh_volume, double gfa_threshold) {
  expect_tag(sh_volume.tag, VolumeKind::sh, "oo_od_maps");
  OOMaps maps = make_oo_maps(sh_volume);
  antipodal_icosphere(sh::PeakOptions{}.mesh_level);
  parallel_for(static_cast<std::int64_t>(sh_volume.voxel_count()), [&](std::int64_t v) {
    oo_od_at_voxel(sh_volume, gfa_threshold, maps, v);
  });
  return maps;
}

OOMaps oo_od_maps_serial(const FloatVolume& sh_volume, double gfa_threshold) {
  expect_tag(sh_volume.tag, VolumeKind::sh, "oo_od_maps");
  OOMaps maps = make_oo_maps(sh_volume);
  serial_for(static_cast<std::int64_t>(sh_volume.voxel_count()), [&](std::int64_t v) {
    oo_od_at_voxel(sh_volume, gfa_threshold, maps, v);
  });
  return maps;
}

}  // namespace dfa::order
