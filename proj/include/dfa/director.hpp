#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dfa/vec3.hpp"

namespace dfa {

// A director is a unit axis identified with its negation. Weighted directors
// carry a scalar weight; (v, w) and (-v, w) are the same object, and the
// dyadic w*v*v^T is the unambiguous representation.
struct WeightedDirector {
  Vec3 axis{0, 0, 1};
  double weight = 0.0;
};

inline Mat3 dyadic(const WeightedDirector& d) { return outer(d.axis, d.axis) * d.weight; }

// Canonical storage form: first nonzero component positive. Exact negation
// only, so flipping the stored sign of the input reproduces identical bits.
Vec3 canonical_director(const Vec3& v);

WeightedDirector make_weighted_director(const Vec3& axis, double weight);

// Difference of two weighted directors as a proper rotation plus a scale,
// free of the sign ambiguity of the director representation.
struct ScaledRotation {
  Mat3 rotation = Mat3::identity();
  double scale = 1.0;
  bool defined = true;
};

struct MeanDirectorResult {
  WeightedDirector director;
  bool unique = true;      // false when several sign classes tie for the norm
  bool exhaustive = true;  // false when the greedy fallback was used
};

struct MainDirectorResult {
  WeightedDirector director;
  bool unique = true;  // false when the top two |eigenvalues| nearly tie
};

// Euclidean mean over the sign assignment maximizing the mean-vector norm.
// Exhaustive search of one sign half-space up to kMeanExhaustiveLimit inputs;
// beyond that a greedy sign-flipping descent is used (local optimum only,
// flagged via `exhaustive`). Weights enter as |w|.
inline constexpr int kMeanExhaustiveLimit = 20;
MeanDirectorResult mean_director(std::span<const WeightedDirector> dirs);

// Axis and eigenvalue of the weighted dyadic sum with the largest absolute
// eigenvalue (the best rank-1 approximation). Sensitive to weight signs.
MainDirectorResult main_director(std::span<const WeightedDirector> dirs,
                                 double tie_rel_tol = 1e-9);

// Director representation of the difference: w1*v1 - w2*s2*v2 with s2 chosen
// so the two vectors fall in a common half-space. The result is itself
// sign-ambiguous. Requires non-negative weights.
Vec3 diff_director(const WeightedDirector& a, const WeightedDirector& b);

// Rotation representation of the difference: R rotates the sign-fixed b onto
// the sign-fixed a, scale = w1/w2. Identical for both sign cases.
ScaledRotation diff_rotation(const WeightedDirector& a, const WeightedDirector& b);

// Sparse director field on a 3D grid; voxels may hold no director.
struct DirectorField {
  std::array<int, 3> dims{0, 0, 0};
  std::array<double, 3> spacing{1, 1, 1};
  std::vector<WeightedDirector> values;
  std::vector<std::uint8_t> present;

  std::size_t size() const {
    return static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
  }
  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(k) * dims[1] + j) * dims[0] + i;
  }
  void allocate(std::array<int, 3> d, std::array<double, 3> s = {1, 1, 1}) {
    dims = d;
    spacing = s;
    values.assign(size(), WeightedDirector{});
    present.assign(size(), 0);
  }
  void set(int i, int j, int k, const WeightedDirector& d) {
    values[index(i, j, k)] = d;
    present[index(i, j, k)] = 1;
  }
};

// Central-difference rotation along a grid axis (0..2): the rotation from the
// mean of the two neighbors to the forward neighbor. Indices clamp to the
// grid (replicate boundary); an empty neighbor leaves the rotation undefined
// (identity, scale 1, defined = false).
ScaledRotation central_difference_rotation(const DirectorField& field, int i, int j, int k,
                                           int axis);

// First-order transport of a director along unit direction u by step k, from
// per-axis difference rotations: sum over axes of u_i R_i (w v) with the
// transpose rotation taken for negative components.
WeightedDirector transport_director(const std::array<ScaledRotation, 3>& rotations,
                                    const Vec3& u, const WeightedDirector& base, double k);

}  // namespace dfa
