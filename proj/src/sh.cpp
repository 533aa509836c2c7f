#include "dfa/sh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include <Eigen/Dense>

#include "dfa/eig3.hpp"

namespace dfa::sh {

namespace {

// Associated Legendre P_l^m(x) for all l <= lmax at fixed m >= 0, with the
// Condon-Shortley phase. out[l] is valid for l >= m.
void assoc_legendre_column(int lmax, int m, double x, std::span<double> out) {
  double somx2 = std::sqrt(std::max(0.0, (1.0 - x) * (1.0 + x)));
  double pmm = 1.0;
  double fact = 1.0;
  for (int i = 0; i < m; ++i) {
    pmm *= -fact * somx2;
    fact += 2.0;
  }
  out[m] = pmm;
  if (lmax == m) return;
  double pmmp1 = x * (2.0 * m + 1.0) * pmm;
  out[m + 1] = pmmp1;
  for (int l = m + 2; l <= lmax; ++l) {
    double pll = (x * (2.0 * l - 1.0) * pmmp1 - (l + m - 1.0) * pmm) / (l - m);
    pmm = pmmp1;
    pmmp1 = pll;
    out[l] = pll;
  }
}

double sh_normalization(int l, int m) {
  double f = 1.0;
  for (int k = l - m + 1; k <= l + m; ++k) f *= k;
  return std::sqrt((2.0 * l + 1.0) / (4.0 * std::numbers::pi) / f);
}

}  // namespace

int order_for_count(int count) {
  for (int l = 0; l <= 32; l += 2)
    if (coeff_count(l) == count) return l;
  return -1;
}

double real_basis(int l, int m, const Vec3& u) {
  if (std::abs(m) > l) throw std::invalid_argument("real_basis: |m| > l");
  int am = std::abs(m);
  std::vector<double> p(l + 1, 0.0);
  assoc_legendre_column(l, am, std::clamp(u.z, -1.0, 1.0), p);
  double v = sh_normalization(l, am) * p[l];
  if (m == 0) return v;
  double phi = std::atan2(u.y, u.x);
  return m < 0 ? std::numbers::sqrt2 * v * std::cos(am * phi)
               : std::numbers::sqrt2 * v * std::sin(am * phi);
}

void eval_basis(int max_order, const Vec3& u, std::span<double> out) {
  if (max_order > 32) throw std::invalid_argument("eval_basis: order above 32");
  const double ct = std::clamp(u.z, -1.0, 1.0);
  const double phi = std::atan2(u.y, u.x);
  double p_buf[33];
  std::span<double> p{p_buf, static_cast<std::size_t>(max_order) + 1};
  // cos/sin of m*phi by incremental rotation
  const double cp = std::cos(phi), sp = std::sin(phi);
  double cm = 1.0, sm = 0.0;
  for (int m = 0; m <= max_order; ++m) {
    if (m > 0) {
      double c = cm * cp - sm * sp;
      double s = sm * cp + cm * sp;
      cm = c;
      sm = s;
    }
    assoc_legendre_column(max_order, m, ct, p);
    for (int l = (m % 2 == 0) ? m : m + 1; l <= max_order; l += 2) {
      double v = sh_normalization(l, m) * p[l];
      if (m == 0) {
        out[coeff_index(l, 0)] = v;
      } else {
        out[coeff_index(l, -m)] = std::numbers::sqrt2 * v * cm;
        out[coeff_index(l, m)] = std::numbers::sqrt2 * v * sm;
      }
    }
  }
}

double eval(const SHCoefficients& f, const Vec3& u) {
  const int nc = coeff_count(f.max_order);
  double stack_buf[256];
  std::vector<double> heap;
  std::span<double> basis;
  if (nc <= 256) {
    basis = {stack_buf, static_cast<std::size_t>(nc)};
  } else {
    heap.resize(nc);
    basis = heap;
  }
  eval_basis(f.max_order, u, basis);
  double s = 0.0;
  for (int i = 0; i < nc; ++i) s += f.c[i] * basis[i];
  return s;
}

namespace {

Eigen::MatrixXd design_matrix(std::span<const Vec3> directions, int max_order) {
  const int nc = coeff_count(max_order);
  Eigen::MatrixXd B(directions.size(), nc);
  std::vector<double> row(nc);
  for (std::size_t i = 0; i < directions.size(); ++i) {
    eval_basis(max_order, directions[i], row);
    for (int j = 0; j < nc; ++j) B(static_cast<int>(i), j) = row[j];
  }
  return B;
}

}  // namespace

FitResult fit(std::span<const Vec3> directions, std::span<const double> values,
              int max_order) {
  const int nc = coeff_count(max_order);
  if (static_cast<int>(directions.size()) < nc)
    throw std::invalid_argument("sh::fit: fewer samples than coefficients");
  if (directions.size() != values.size())
    throw std::invalid_argument("sh::fit: direction/value count mismatch");

  Eigen::MatrixXd B = design_matrix(directions, max_order);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(B, Eigen::ComputeThinU | Eigen::ComputeThinV);
  double smax = svd.singularValues()(0);
  double smin = svd.singularValues()(nc - 1);
  double condition = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
  if (!(smin > smax * 1e-10))
    throw std::invalid_argument("sh::fit: rank-deficient sampling (condition estimate " +
                                std::to_string(condition) + ")");

  Eigen::VectorXd y(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) y(static_cast<int>(i)) = values[i];
  Eigen::VectorXd c = svd.solve(y);

  FitResult out;
  out.coeffs.max_order = max_order;
  out.coeffs.c.assign(c.data(), c.data() + nc);
  out.residual = (B * c - y).norm();
  out.condition = condition;
  return out;
}

FitOperator::FitOperator(std::span<const Vec3> directions, int max_order)
    : max_order_(max_order), n_samples_(static_cast<int>(directions.size())) {
  const int nc = coeff_count(max_order);
  if (n_samples_ < nc) throw std::invalid_argument("FitOperator: too few samples");
  Eigen::MatrixXd B = design_matrix(directions, max_order);
  Eigen::MatrixXd P =
      (B.transpose() * B).ldlt().solve(B.transpose());  // nc x n
  pinv_.resize(static_cast<std::size_t>(nc) * n_samples_);
  for (int i = 0; i < nc; ++i)
    for (int j = 0; j < n_samples_; ++j)
      pinv_[static_cast<std::size_t>(i) * n_samples_ + j] = P(i, j);
}

SHCoefficients FitOperator::apply(std::span<const double> values) const {
  if (static_cast<int>(values.size()) != n_samples_)
    throw std::invalid_argument("FitOperator: sample count mismatch");
  SHCoefficients out = SHCoefficients::zeros(max_order_);
  const int nc = coeff_count(max_order_);
  for (int i = 0; i < nc; ++i) {
    const double* row = &pinv_[static_cast<std::size_t>(i) * n_samples_];
    double s = 0.0;
    for (int j = 0; j < n_samples_; ++j) s += row[j] * values[j];
    out.c[i] = s;
  }
  return out;
}

namespace {

struct RotationWorkspace {
  std::vector<Vec3> points;
  FitOperator op;
};

// Shared resample/refit machinery per order: the reduced icosphere level is
// chosen to oversample the coefficient count at least twofold.
const RotationWorkspace& rotation_workspace(int max_order) {
  static std::mutex mu;
  static std::map<int, RotationWorkspace> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(max_order);
  if (it == cache.end()) {
    int level = max_order <= 2 ? 1 : (max_order <= 8 ? 3 : 4);
    const SphereMesh& mesh = antipodal_icosphere(level);
    RotationWorkspace ws{mesh.vertices, FitOperator(mesh.vertices, max_order)};
    it = cache.emplace(max_order, std::move(ws)).first;
  }
  return it->second;
}

}  // namespace

SHCoefficients rotate(const SHCoefficients& f, const Mat3& R) {
  if (f.max_order > 16) throw std::invalid_argument("sh::rotate supports orders up to 16");
  const RotationWorkspace& ws = rotation_workspace(f.max_order);
  Mat3 Rt = transpose(R);
  std::vector<double> samples(ws.points.size());
  for (std::size_t i = 0; i < ws.points.size(); ++i)
    samples[i] = eval(f, Rt * ws.points[i]);
  return ws.op.apply(samples);
}

double gfa(const SHCoefficients& f) {
  double total = 0.0;
  for (double v : f.c) total += v * v;
  if (total <= 0.0) throw std::invalid_argument("gfa: null function");
  double c00 = f.c[0];
  return std::sqrt(std::max(0.0, 1.0 - c00 * c00 / total));
}

double tensor_odf(const Mat3& D, const Vec3& u) {
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      if (std::fabs(D(i, j) - D(j, i)) > 1e-12 * std::max(1.0, frobenius_norm(D)))
        throw std::invalid_argument("tensor_odf: tensor not symmetric");
  SymmetricEigen3 e = eigen_symmetric(D);
  if (e.values[2] <= 0.0) throw std::invalid_argument("tensor_odf: tensor not positive definite");
  Mat3 Dinv = inverse(D);
  double q = dot(u, Dinv * u);
  double d = det(D);
  return 1.0 / (4.0 * std::numbers::pi * std::sqrt(d) * std::pow(q, 1.5));
}

namespace {

// Gradient ascent on the sphere: tangent-plane finite-difference gradient,
// step halving on non-increase.
Vec3 refine_peak(const SHCoefficients& f, Vec3 u, double* value_out) {
  const double h = 1e-4;
  double step = 0.1;
  double fu = eval(f, u);
  for (int it = 0; it < 100 && step > 1e-7; ++it) {
    Vec3 e1 = normalized(cross(u, std::fabs(u.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0}));
    Vec3 e2 = cross(u, e1);
    double g1 = (eval(f, normalized(u + h * e1)) - eval(f, normalized(u - h * e1))) / (2 * h);
    double g2 = (eval(f, normalized(u + h * e2)) - eval(f, normalized(u - h * e2))) / (2 * h);
    Vec3 g = g1 * e1 + g2 * e2;
    double gn = norm(g);
    if (gn < 1e-14) break;
    // keep the gradient while halving the step on non-increase
    bool moved = false;
    while (step > 1e-7) {
      Vec3 cand = normalized(u + (step / gn) * g);
      double fc = eval(f, cand);
      if (fc > fu) {
        bool converged = fc - fu < 1e-8;
        u = cand;
        fu = fc;
        moved = true;
        if (converged) step = 0.0;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  if (value_out) *value_out = fu;
  return u;
}

}  // namespace

namespace {

// Basis values at the vertices of a shared mesh, built once per
// (mesh, order) pair. Rows are vertices.
const std::vector<double>* cached_mesh_basis(const SphereMesh& mesh, int order) {
  if (mesh.cache_id < 0) return nullptr;
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::vector<double>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(mesh.cache_id, order);
  auto it = cache.find(key);
  if (it == cache.end()) {
    const int nc = coeff_count(order);
    std::vector<double> table(mesh.vertices.size() * nc);
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v)
      eval_basis(order, mesh.vertices[v], {table.data() + v * nc, static_cast<std::size_t>(nc)});
    it = cache.emplace(key, std::move(table)).first;
  }
  return &it->second;
}

}  // namespace

std::vector<WeightedDirector> detect_peaks(const SHCoefficients& f, const SphereMesh& mesh,
                                           double gfa_threshold, double peak_ratio) {
  PeakOptions opts;
  opts.gfa_threshold = gfa_threshold;
  opts.peak_ratio = peak_ratio;

  double g;
  try {
    g = gfa(f);
  } catch (const std::invalid_argument&) {
    return {};  // null function: nothing to detect
  }
  if (g < opts.gfa_threshold) return {};

  std::vector<double> fv(mesh.vertices.size());
  if (const std::vector<double>* table = cached_mesh_basis(mesh, f.max_order)) {
    const int nc = coeff_count(f.max_order);
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
      const double* row = table->data() + i * nc;
      double s = 0.0;
      for (int q = 0; q < nc; ++q) s += row[q] * f.c[q];
      fv[i] = s;
    }
  } else {
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) fv[i] = eval(f, mesh.vertices[i]);
  }

  double mesh_max = fv.empty() ? 0.0 : *std::max_element(fv.begin(), fv.end());

  std::vector<WeightedDirector> peaks;
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    bool is_max = true;
    for (int nb : mesh.neighbors[i])
      if (fv[nb] > fv[i]) { is_max = false; break; }
    if (!is_max) continue;
    // seeds hopelessly below the ratio threshold cannot refine into kept
    // peaks; 0.8 covers the grid-resolution gap to the true maximum
    if (fv[i] < 0.8 * opts.peak_ratio * mesh_max) continue;
    double val;
    Vec3 u = refine_peak(f, mesh.vertices[i], &val);
    peaks.push_back({canonical_director(u), val});
  }

  // Merge antipodal/mesh duplicates within the merge radius, keep the larger.
  const double cos_merge = std::cos(opts.merge_angle_deg * std::numbers::pi / 180.0);
  std::sort(peaks.begin(), peaks.end(), [](const auto& a, const auto& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    if (a.axis.x != b.axis.x) return a.axis.x < b.axis.x;
    if (a.axis.y != b.axis.y) return a.axis.y < b.axis.y;
    return a.axis.z < b.axis.z;
  });
  std::vector<WeightedDirector> merged;
  for (const auto& p : peaks) {
    bool dup = false;
    for (const auto& q : merged)
      if (std::fabs(dot(p.axis, q.axis)) >= cos_merge) { dup = true; break; }
    if (!dup) merged.push_back(p);
  }

  if (merged.empty()) return merged;
  double fmax = merged[0].weight;
  std::vector<WeightedDirector> out;
  for (const auto& p : merged)
    if (p.weight >= opts.peak_ratio * fmax) out.push_back(p);
  return out;
}

std::vector<WeightedDirector> detect_peaks(const SHCoefficients& f, const PeakOptions& opts) {
  return detect_peaks(f, antipodal_icosphere(opts.mesh_level), opts.gfa_threshold,
                      opts.peak_ratio);
}

}  // namespace dfa::sh
