#pragma once

#include <array>
#include <complex>
#include <vector>

#include "dfa/eig3.hpp"
#include "dfa/vec3.hpp"
#include "dfa/volume.hpp"

namespace dfa::tfa {

// Upper-triangular tensor components at a voxel of a tensor6 volume.
Mat3 tensor_at(const FloatVolume& vol, int i, int j, int k);
void set_tensor(FloatVolume& vol, int i, int j, int k, const Mat3& D);

// Spatial gradient of a tensor field: G[c] holds the derivative of the
// tensor along grid axis c, central differences over physical spacing with a
// replicate boundary. Symmetric in the tensor indices (18 unique values).
struct TensorGradient {
  std::array<Mat3, 3> g;
};

TensorGradient tensor_gradient(const FloatVolume& tensor_volume, int i, int j, int k);

// Contraction of the gradient with a tensor-space weighting: the spatial
// gradient of the scalar field sum_ij W_ij D_ij.
Vec3 project_gradient_to_vector(const Mat3& W, const TensorGradient& grad);

// Further contraction with a spatial direction: the directional derivative
// of the same scalar field along v.
double project_gradient_to_scalar(const Mat3& W, const TensorGradient& grad, const Vec3& v);

// Change of the tensor under an infinitesimal rotation about its p-th
// eigenvector (p in 0..2, ordered by descending eigenvalue). Throws for
// (near-)repeated eigenvalues where the tangent is not well defined.
Mat3 rotation_tangent(const Mat3& D, int p, double degeneracy_rel_tol = 1e-9);

// Fourth-order structure tensor with entries grad_k(D_ij) * grad_l(D_ij)
// (per-component products, no contraction), packed as a 6x6 matrix over the
// index pairs (11,12,13,22,23,33) for rows (ij) and columns (kl).  Minor
// symmetric, but the 6x6 matrix is not symmetric in general.
struct StructureTensor4 {
  std::array<std::array<double, 6>, 6> m{};

  // value by full indices, i,j,k,l in 0..2
  double at(int i, int j, int k, int l) const;

  // contraction sum_ijkl W_ij v_k v_l at(i,j,k,l)
  double contract(const Mat3& W, const Vec3& v) const;
};

StructureTensor4 structure_tensor_4(const TensorGradient& grad);

struct StructureSpectrum {
  std::array<std::complex<double>, 6> eigenvalues;  // sorted by descending |.|
  bool has_complex = false;
};

StructureSpectrum structure_tensor_spectrum(const StructureTensor4& t);

// Scalar invariants used by the synthetic generators and CLI maps.
double fractional_anisotropy(const std::array<double, 3>& eigenvalues);
double fractional_anisotropy(const Mat3& D);
double tensor_mode(const Mat3& D);

}  // namespace dfa::tfa
