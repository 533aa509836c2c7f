#include "dfa/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <set>
#include <stdexcept>

namespace dfa {

namespace {

struct EdgeKey {
  int a, b;
  bool operator<(const EdgeKey& o) const { return a != o.a ? a < o.a : b < o.b; }
};

}  // namespace

SphereMesh icosphere(int level) {
  if (level < 0 || level > 6) throw std::invalid_argument("icosphere level out of range");

  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> verts = {
      {-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0},
      {0, -1, t}, {0, 1, t}, {0, -1, -t}, {0, 1, -t},
      {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (Vec3& v : verts) v = normalized(v);
  std::vector<std::array<int, 3>> faces = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

  for (int l = 0; l < level; ++l) {
    std::map<EdgeKey, int> midpoint;
    auto mid = [&](int a, int b) {
      EdgeKey k{std::min(a, b), std::max(a, b)};
      auto it = midpoint.find(k);
      if (it != midpoint.end()) return it->second;
      Vec3 m = normalized(verts[a] + verts[b]);
      verts.push_back(m);
      int idx = static_cast<int>(verts.size()) - 1;
      midpoint.emplace(k, idx);
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(faces.size() * 4);
    for (const auto& f : faces) {
      int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    faces.swap(next);
  }

  SphereMesh mesh;
  mesh.vertices = verts;
  std::vector<std::set<int>> adj(verts.size());
  for (const auto& f : faces) {
    adj[f[0]].insert(f[1]); adj[f[0]].insert(f[2]);
    adj[f[1]].insert(f[0]); adj[f[1]].insert(f[2]);
    adj[f[2]].insert(f[0]); adj[f[2]].insert(f[1]);
  }
  mesh.neighbors.resize(verts.size());
  for (std::size_t i = 0; i < verts.size(); ++i)
    mesh.neighbors[i].assign(adj[i].begin(), adj[i].end());
  return mesh;
}

namespace {

SphereMesh reduce_antipodal(const SphereMesh& full) {
  const double tol = 1e-9;
  auto canonical = [&](const Vec3& v) {
    if (v.z > tol || (std::fabs(v.z) <= tol && v.y > tol) ||
        (std::fabs(v.z) <= tol && std::fabs(v.y) <= tol && v.x > 0))
      return v;
    return -v;
  };

  std::vector<int> remap(full.vertices.size(), -1);
  std::vector<Vec3> kept;
  for (std::size_t i = 0; i < full.vertices.size(); ++i) {
    Vec3 c = canonical(full.vertices[i]);
    int found = -1;
    for (std::size_t j = 0; j < kept.size(); ++j)
      if (norm(kept[j] - c) < 1e-7) { found = static_cast<int>(j); break; }
    if (found < 0) {
      kept.push_back(c);
      found = static_cast<int>(kept.size()) - 1;
    }
    remap[i] = found;
  }

  SphereMesh mesh;
  mesh.vertices = kept;
  mesh.antipodally_reduced = true;
  std::vector<std::set<int>> adj(kept.size());
  for (std::size_t i = 0; i < full.vertices.size(); ++i)
    for (int nb : full.neighbors[i])
      if (remap[nb] != remap[i]) adj[remap[i]].insert(remap[nb]);
  mesh.neighbors.resize(kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i)
    mesh.neighbors[i].assign(adj[i].begin(), adj[i].end());
  return mesh;
}

}  // namespace

const SphereMesh& antipodal_icosphere(int level) {
  static std::mutex mu;
  static std::map<int, SphereMesh> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(level);
  if (it == cache.end()) {
    SphereMesh mesh = reduce_antipodal(icosphere(level));
    mesh.cache_id = level;
    it = cache.emplace(level, std::move(mesh)).first;
  }
  return it->second;
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.resize(n);
  weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Newton from the Chebyshev-like initial guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      double dx = p0 / pp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
    weights[n - 1 - i] = weights[i];
  }
}

SphereQuadrature sphere_quadrature(int n_theta) {
  if (n_theta < 2) throw std::invalid_argument("sphere_quadrature needs n_theta >= 2");
  std::vector<double> x, w;
  gauss_legendre(n_theta, x, w);
  const int n_phi = 2 * n_theta;
  const double wphi = 2.0 * std::numbers::pi / n_phi;

  SphereQuadrature q;
  q.points.reserve(static_cast<std::size_t>(n_theta) * n_phi);
  q.weights.reserve(q.points.capacity());
  for (int i = 0; i < n_theta; ++i) {
    double ct = x[i];
    double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    for (int j = 0; j < n_phi; ++j) {
      double phi = wphi * j;
      q.points.push_back({st * std::cos(phi), st * std::sin(phi), ct});
      q.weights.push_back(w[i] * wphi);
    }
  }
  return q;
}

}  // namespace dfa
