#pragma once

#include <vector>

#include "dfa/vec3.hpp"

namespace dfa {

// Unit-sphere triangulation with per-vertex adjacency. Antipodal meshes keep
// one representative per {v, -v} pair; adjacency is the projective one, so
// every vertex keeps at least five neighbors.
struct SphereMesh {
  std::vector<Vec3> vertices;
  std::vector<std::vector<int>> neighbors;
  bool antipodally_reduced = false;
  // set for the shared cached meshes; lets evaluation tables key off it
  int cache_id = -1;
};

// Subdivided icosahedron; level 0 is the icosahedron itself
// (vertex counts: 12, 42, 162, 642, 2562, 10242).
SphereMesh icosphere(int level);

// Antipodally reduced icosphere, cached per level (read-only after creation).
const SphereMesh& antipodal_icosphere(int level);

// Spherical quadrature: Gauss-Legendre in cos(theta) crossed with a uniform
// trapezoid in phi (2*n_theta points). Exact for spherical polynomials up to
// degree ~2*n_theta - 1 and spectrally accurate for smooth integrands.
struct SphereQuadrature {
  std::vector<Vec3> points;
  std::vector<double> weights;

  template <class F>
  double integrate(F&& f) const {
    double s = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) s += weights[i] * f(points[i]);
    return s;
  }
};

SphereQuadrature sphere_quadrature(int n_theta);

// Gauss-Legendre nodes/weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace dfa
