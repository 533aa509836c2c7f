#include "dfa/director.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dfa/eig3.hpp"

namespace dfa {

namespace {

void check_axis(const Vec3& v) {
  double n = norm(v);
  if (n < 1e-12) throw std::invalid_argument("degenerate axis");
  if (std::fabs(n - 1.0) > 1e-12) throw std::invalid_argument("axis not unit norm");
}

bool lex_less(const Vec3& a, const Vec3& b) {
  if (a.x != b.x) return a.x < b.x;
  if (a.y != b.y) return a.y < b.y;
  return a.z < b.z;
}

}  // namespace

Vec3 canonical_director(const Vec3& v) {
  if (v.x != 0.0) return v.x > 0.0 ? v : -v;
  if (v.y != 0.0) return v.y > 0.0 ? v : -v;
  if (v.z != 0.0) return v.z > 0.0 ? v : -v;
  return v;
}

WeightedDirector make_weighted_director(const Vec3& axis, double weight) {
  double n = norm(axis);
  if (n < 1e-12) throw std::invalid_argument("degenerate axis");
  return {axis / n, weight};
}

MeanDirectorResult mean_director(std::span<const WeightedDirector> dirs) {
  const std::size_t n = dirs.size();
  if (n == 0) throw std::invalid_argument("no directors");

  std::vector<Vec3> wv(n);
  for (std::size_t i = 0; i < n; ++i) {
    check_axis(dirs[i].axis);
    wv[i] = dirs[i].axis * std::fabs(dirs[i].weight);
  }

  MeanDirectorResult out;
  Vec3 best_sum{};
  double best_norm2 = -1.0;

  if (n <= static_cast<std::size_t>(kMeanExhaustiveLimit)) {
    // Fix the first sign; enumerate the remaining half-space.
    const std::uint64_t cases = std::uint64_t{1} << (n - 1);
    std::vector<Vec3> exact_ties;
    std::size_t near_ties = 0;
    for (std::uint64_t mask = 0; mask < cases; ++mask) {
      Vec3 s = wv[0];
      for (std::size_t i = 1; i < n; ++i)
        s += (mask >> (i - 1)) & 1 ? -wv[i] : wv[i];
      double n2 = norm2(s);
      if (n2 > best_norm2) {
        best_norm2 = n2;
        best_sum = s;
        exact_ties.assign(1, s);
      } else if (n2 == best_norm2) {
        exact_ties.push_back(s);
      }
    }
    {
      // second pass only for the uniqueness flag
      for (std::uint64_t mask = 0; mask < cases; ++mask) {
        Vec3 s = wv[0];
        for (std::size_t i = 1; i < n; ++i)
          s += (mask >> (i - 1)) & 1 ? -wv[i] : wv[i];
        if (norm2(s) >= best_norm2 * (1.0 - 1e-12)) ++near_ties;
      }
      if (near_ties > 1) out.unique = false;
    }
    if (exact_ties.size() > 1) {
      // Deterministic representative among exactly tied classes: the one with
      // the lexicographically smallest canonical axis. The norm is unchanged.
      Vec3 pick = canonical_director(normalized(exact_ties[0]));
      best_sum = exact_ties[0];
      for (const Vec3& t : exact_ties) {
        Vec3 c = canonical_director(normalized(t));
        if (lex_less(c, pick)) {
          pick = c;
          best_sum = t;
        }
      }
    }
  } else {
    // Greedy coordinate sign descent from the all-positive assignment.
    out.exhaustive = false;
    std::vector<int> s(n, 1);
    Vec3 sum{};
    for (const Vec3& v : wv) sum += v;
    for (int pass = 0; pass < 1000; ++pass) {
      int best_i = -1;
      double best_gain = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        // ||sum - 2 s_i wv_i||^2 - ||sum||^2
        double gain = 4.0 * norm2(wv[i]) - 4.0 * s[i] * dot(sum, wv[i]);
        if (gain > best_gain + 1e-15) {
          best_gain = gain;
          best_i = static_cast<int>(i);
        }
      }
      if (best_i < 0) break;
      sum -= 2.0 * s[best_i] * wv[best_i];
      s[best_i] = -s[best_i];
    }
    best_sum = sum;
    best_norm2 = norm2(sum);
  }

  Vec3 mean = best_sum / static_cast<double>(n);
  double w = norm(mean);
  if (w < 1e-300) {
    out.director = {canonical_director(dirs[0].axis), 0.0};
    out.unique = false;
  } else {
    out.director = {canonical_director(mean / w), w};
  }
  return out;
}

MainDirectorResult main_director(std::span<const WeightedDirector> dirs, double tie_rel_tol) {
  if (dirs.empty()) throw std::invalid_argument("no directors");
  Mat3 t;
  for (const auto& d : dirs) {
    check_axis(d.axis);
    t += outer(d.axis, d.axis) * d.weight;
  }
  SymmetricEigen3 e = eigen_symmetric(t);

  int top = 0, second = 1;
  if (std::fabs(e.values[2]) > std::fabs(e.values[top])) top = 2;
  for (int i = 0; i < 3; ++i)
    if (i != top &&
        (std::fabs(e.values[i]) > std::fabs(e.values[second]) || second == top))
      second = i;

  MainDirectorResult out;
  out.director = {e.vectors[top], e.values[top]};
  double ref = std::max(std::fabs(e.values[top]), 1e-300);
  out.unique = std::fabs(std::fabs(e.values[top]) - std::fabs(e.values[second])) >=
               tie_rel_tol * ref;
  return out;
}

Vec3 diff_director(const WeightedDirector& a, const WeightedDirector& b) {
  check_axis(a.axis);
  check_axis(b.axis);
  if (a.weight < 0.0 || b.weight < 0.0)
    throw std::invalid_argument("diff_director requires non-negative weights");
  double s2 = dot(a.axis, b.axis) >= 0.0 ? 1.0 : -1.0;
  return a.weight * a.axis - (b.weight * s2) * b.axis;
}

ScaledRotation diff_rotation(const WeightedDirector& a, const WeightedDirector& b) {
  check_axis(a.axis);
  check_axis(b.axis);
  if (a.weight < 0.0 || b.weight < 0.0)
    throw std::invalid_argument("diff_rotation requires non-negative weights");
  if (b.weight <= 0.0) throw std::invalid_argument("diff_rotation requires b.weight > 0");
  double s2 = dot(a.axis, b.axis) >= 0.0 ? 1.0 : -1.0;
  ScaledRotation out;
  out.rotation = rotation_between_unit(s2 * b.axis, a.axis);
  out.scale = a.weight / b.weight;
  return out;
}

ScaledRotation central_difference_rotation(const DirectorField& field, int i, int j, int k,
                                           int axis) {
  auto clamp = [](int v, int hi) { return v < 0 ? 0 : (v >= hi ? hi - 1 : v); };
  int fi = i, fj = j, fk = k, bi = i, bj = j, bk = k;
  (axis == 0 ? fi : axis == 1 ? fj : fk) += 1;
  (axis == 0 ? bi : axis == 1 ? bj : bk) -= 1;
  fi = clamp(fi, field.dims[0]); fj = clamp(fj, field.dims[1]); fk = clamp(fk, field.dims[2]);
  bi = clamp(bi, field.dims[0]); bj = clamp(bj, field.dims[1]); bk = clamp(bk, field.dims[2]);

  std::size_t f = field.index(fi, fj, fk), b = field.index(bi, bj, bk);
  if (!field.present[f] || !field.present[b]) {
    ScaledRotation r;
    r.defined = false;
    return r;
  }
  const WeightedDirector fw = field.values[f];
  const WeightedDirector bw{field.values[b].axis, std::fabs(field.values[b].weight)};
  const WeightedDirector fwp{fw.axis, std::fabs(fw.weight)};

  std::array<WeightedDirector, 2> pair{bw, fwp};
  MeanDirectorResult m = mean_director(pair);
  if (m.director.weight <= 0.0) {
    ScaledRotation r;
    r.defined = false;
    return r;
  }
  return diff_rotation(fwp, m.director);
}

WeightedDirector transport_director(const std::array<ScaledRotation, 3>& rotations,
                                    const Vec3& u, const WeightedDirector& base, double k) {
  check_axis(base.axis);
  Vec3 wv = base.axis * base.weight;
  Vec3 sum{};
  for (int i = 0; i < 3; ++i) {
    double ui = u[i];
    if (ui >= 0.0)
      sum += ui * (rotations[i].rotation * wv);
    else
      sum += -ui * (transpose(rotations[i].rotation) * wv);
  }
  sum *= k;
  double w = norm(sum);
  if (w < 1e-300) return {canonical_director(base.axis), 0.0};
  return {sum / w, w};
}

}  // namespace dfa
