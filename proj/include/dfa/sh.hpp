#pragma once

#include <cstdlib>
#include <span>
#include <vector>

#include "dfa/director.hpp"
#include "dfa/sphere.hpp"
#include "dfa/vec3.hpp"

namespace dfa::sh {

// Real spherical harmonics restricted to even orders (antipodally symmetric
// functions). Coefficients are indexed by l*(l+1)/2 + m over even l.
inline int coeff_count(int max_order) { return (max_order + 1) * (max_order + 2) / 2; }
inline int coeff_index(int l, int m) { return l * (l + 1) / 2 + m; }

// Maximum even order resolvable with a given coefficient count, or -1.
int order_for_count(int count);

// Single real SH basis value. Negative m carries the cosine branch, positive
// m the sine branch; the associated Legendre part includes the
// Condon-Shortley phase.
double real_basis(int l, int m, const Vec3& u);

// All even-order basis values up to max_order at one point.
void eval_basis(int max_order, const Vec3& u, std::span<double> out);

struct SHCoefficients {
  int max_order = 0;
  std::vector<double> c;

  static SHCoefficients zeros(int order) {
    return {order, std::vector<double>(coeff_count(order), 0.0)};
  }
  // raw even-order storage access
  double& at(int l, int m) { return c[coeff_index(l, m)]; }
  double at(int l, int m) const { return c[coeff_index(l, m)]; }
  // general query: odd orders and anything beyond the band limit are zero
  double coefficient(int l, int m) const {
    if (l < 0 || l % 2 != 0 || l > max_order || std::abs(m) > l) return 0.0;
    return c[coeff_index(l, m)];
  }
};

double eval(const SHCoefficients& f, const Vec3& u);

struct FitResult {
  SHCoefficients coeffs;
  double residual = 0.0;   // L2 norm of the sample misfit
  double condition = 0.0;  // design-matrix condition estimate
};

// Least-squares fit of point samples. Throws on rank deficiency, reporting
// the condition estimate.
FitResult fit(std::span<const Vec3> directions, std::span<const double> values,
              int max_order);

// Precomputed pseudoinverse for repeated fits against fixed directions.
class FitOperator {
 public:
  FitOperator(std::span<const Vec3> directions, int max_order);
  SHCoefficients apply(std::span<const double> values) const;
  int max_order() const { return max_order_; }
  int sample_count() const { return n_samples_; }

 private:
  int max_order_;
  int n_samples_;
  std::vector<double> pinv_;  // coeff_count x n_samples, row-major
};

// Coefficients of the rotated function (R f)(u) = f(R^-1 u), computed by
// resampling on a fixed symmetric point set and refitting. Exact for
// band-limited input. Supported up to max_order 16.
SHCoefficients rotate(const SHCoefficients& f, const Mat3& R);

// Generalized fractional anisotropy from the coefficient norms.
double gfa(const SHCoefficients& f);

// Orientation distribution function of a diffusion tensor (unit integral
// over the sphere). Throws if D is not symmetric positive definite.
double tensor_odf(const Mat3& D, const Vec3& u);

struct PeakOptions {
  double gfa_threshold = 0.3;
  double peak_ratio = 0.5;
  double merge_angle_deg = 5.0;
  int mesh_level = 3;
};

// ODF maxima as weighted directors, sorted by descending value; the first
// entry is the principal peak. Grid search over the antipodal mesh followed
// by tangent-plane gradient ascent. Returns an empty list when the GFA falls
// below the threshold.
std::vector<WeightedDirector> detect_peaks(const SHCoefficients& f, const SphereMesh& mesh,
                                           double gfa_threshold, double peak_ratio);
std::vector<WeightedDirector> detect_peaks(const SHCoefficients& f,
                                           const PeakOptions& opts = {});

}  // namespace dfa::sh
