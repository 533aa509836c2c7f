#pragma once

#include "dfa/vec3.hpp"

namespace dfa {

struct SymmetricEigen3 {
  // Eigenvalues sorted descending; eigenvector(i) belongs to value(i).
  std::array<double, 3> values{};
  std::array<Vec3, 3> vectors{};

  // True when the spread between consecutive eigenvalues falls below the
  // relative tolerance passed to the solver.
  bool degenerate = false;
};

// Analytic eigendecomposition of a symmetric 3x3 matrix (characteristic
// polynomial via the trigonometric method, one Newton polish step per root,
// eigenvectors from row cross products). Eigenvector signs are canonical:
// first nonzero component positive.
SymmetricEigen3 eigen_symmetric(const Mat3& a, double degeneracy_rel_tol = 1e-9);

}  // namespace dfa
