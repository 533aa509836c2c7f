#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "dfa/peaks.hpp"
#include "dfa/sh.hpp"
#include "dfa/sphere.hpp"
#include "dfa/vec3.hpp"
#include "dfa/volume.hpp"

namespace dfa::order {

// Second moment of a spherical function, as the exact linear image of its
// l <= 2 coefficients (frozen constant table; regenerated by quadrature in
// the tests).
Mat3 orientational_tensor(const sh::SHCoefficients& f);

// Orientational order along an axis. Default path goes through the
// orientational tensor: 1.5 n^T Q n - 0.5 * integral(f).
double oo(const sh::SHCoefficients& f, const Vec3& axis);

// Order and dispersion along one axis: od is the exact complement of oo.
// For PDF inputs oo lies in [-0.5, 1] and od in [0, 1.5].
struct OOResult {
  double oo = 0.0;
  double od = 1.0;
  Vec3 axis{0, 0, 1};
};

OOResult oo_od(const sh::SHCoefficients& f, const Vec3& axis);

// Same quantity by direct quadrature of the degree-2 Legendre kernel against
// the synthesized function; the independent route for cross-checks.
double oo_quadrature(const sh::SHCoefficients& f, const Vec3& axis, const SphereQuadrature& q);

// Same quantity through rotated coefficients: rotate the l <= 2 block so the
// axis lands on z and read the (2,0) coefficient.
double oo_sh_path(const sh::SHCoefficients& f, const Vec3& axis);

// Axisymmetric closed form from the 2nd Legendre coefficient a2 of the
// profile and the angle phi between the evaluation axis and the symmetry
// axis: (1 + 3 cos 2 phi)/4 * 2 pi a2.
double oo_axisymmetric(double a2, double phi);

// Watson concentration kappa -> orientational order along the Watson axis,
// evaluated in the numerically stable Dawson-function form.
double oo_watson(double kappa);
double od_watson(double kappa);

// Dispersion index used by Watson-based neurite models: (2/pi) atan(1/kappa).
double od_w(double kappa);

// Prolate tensor (l1 >= l2 = l3 > 0) closed form along the principal axis.
double oo_prolate_tensor(double l1, double l2);

// Upper bound of OO over all axes given GFA and the mean coefficient.
double oo_upper_bound(double gfa, double c00);

// Dawson integral D(x) = exp(-x^2) int_0^x exp(t^2) dt, |error| < 1e-12.
double dawson(double x);

using OOFunction = std::function<double(const Vec3&)>;

// Pointwise mixture of per-component OO functions; weights must sum to 1.
OOFunction oo_mixture(std::span<const std::pair<double, OOFunction>> components);

struct RegionTensorResult {
  Mat3 tensor;
  Vec3 main_axis;
  double main_value = 0.0;
  bool degenerate = false;  // top-two |eigenvalues| tie
};

// Weight-normalized orientational tensor over a set of voxels of an sh:L
// volume. Throws on an empty region.
RegionTensorResult region_orientational_tensor(const FloatVolume& sh_volume,
                                               std::span<const std::array<int, 3>> region,
                                               std::span<const double> weights = {});

struct OOMaps {
  FloatVolume oo;
  FloatVolume od;
  MaskVolume valid;
};

// Per-voxel OO/OD along the principal ODF peak: peak detection where the GFA
// clears the threshold, then the rotated-coefficient evaluation. Voxels
// without peaks carry the OO = 0 / OD = 1 sentinel and a cleared mask bit.
OOMaps oo_od_maps(const FloatVolume& sh_volume, double gfa_threshold);
OOMaps oo_od_maps_serial(const FloatVolume& sh_volume, double gfa_threshold);

}  // namespace dfa::order
