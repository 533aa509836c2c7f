#include "dfa/synth.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "dfa/parallel.hpp"
#include "dfa/sh.hpp"
#include "dfa/tfa.hpp"

namespace dfa::synth {

FieldKind parse_kind(const std::string& s) {
  if (s == "splay") return FieldKind::splay;
  if (s == "bend") return FieldKind::bend;
  if (s == "twist") return FieldKind::twist;
  if (s == "circle-bend" || s == "circle_bend") return FieldKind::circle_bend;
  if (s == "circle-splay" || s == "circle_splay") return FieldKind::circle_splay;
  if (s == "helical") return FieldKind::helical;
  throw std::invalid_argument("unknown synthetic field kind '" + s + "'");
}

namespace {

void validate(const SyntheticSpec& spec) {
  for (int d : spec.dims)
    if (d < 3) throw std::invalid_argument("synthetic dims must be at least 3 per axis");
  const auto& ev = spec.eigenvalues;
  if (!(ev[0] >= ev[1] && ev[1] >= ev[2] && ev[2] > 0.0))
    throw std::invalid_argument("synthetic eigenvalues must be positive and descending");
  if (spec.mode_blend_bottom < 0 || spec.mode_blend_bottom > 1 || spec.mode_blend_top < 0 ||
      spec.mode_blend_top > 1)
    throw std::invalid_argument("mode blend parameters must lie in [0, 1]");
}

// Orientation of the construction at a voxel: columns are the tensor
// eigenvector frame. Independent of the eigenvalue sweep.
Mat3 orientation_at(const SyntheticSpec& spec, int i, int j, int k) {
  (void)k;
  const int nx = spec.dims[0];
  const double t = nx > 1 ? static_cast<double>(i) / (nx - 1) : 0.0;
  switch (spec.kind) {
    case FieldKind::splay: {
      // principal director up (y), fanning about z, centered
      double a = spec.angle_range * (t - 0.5);
      Mat3 base;  // columns y, z, x
      base(1, 0) = 1;
      base(2, 1) = 1;
      base(0, 2) = 1;
      return axis_angle_rotation({0, 0, 1}, a) * base;
    }
    case FieldKind::bend: {
      // principal director along x, turning about z, centered
      double a = spec.angle_range * (t - 0.5);
      return axis_angle_rotation({0, 0, 1}, a);  // columns x, y, z
    }
    case FieldKind::twist:
    case FieldKind::helical: {
      // principal director perpendicular to x, rotating about x
      double a = spec.angle_range * t;
      Mat3 base;  // columns y, z, x
      base(1, 0) = 1;
      base(2, 1) = 1;
      base(0, 2) = 1;
      return axis_angle_rotation({1, 0, 0}, a) * base;
    }
    case FieldKind::circle_bend:
    case FieldKind::circle_splay: {
      double cx = (spec.dims[0] - 1) / 2.0, cy = (spec.dims[1] - 1) / 2.0;
      double rx = i - cx, ry = j - cy;
      double rn = std::hypot(rx, ry);
      if (rn < 0.5) return Mat3::zero();  // singular center
      Vec3 radial{rx / rn, ry / rn, 0};
      Vec3 tangential{-radial.y, radial.x, 0};
      Vec3 v1 = spec.kind == FieldKind::circle_bend ? tangential : radial;
      Vec3 v2 = spec.kind == FieldKind::circle_bend ? radial : tangential;
      Mat3 m;
      for (int r = 0; r < 3; ++r) {
        m(r, 0) = v1[r];
        m(r, 1) = v2[r];
        m(r, 2) = (r == 2) ? 1.0 : 0.0;  // z completes the frame
      }
      return m;
    }
  }
  return Mat3::identity();
}

std::array<double, 3> eigenvalues_at(const SyntheticSpec& spec, int j) {
  const int ny = spec.dims[1];
  double t = ny > 1 ? static_cast<double>(j) / (ny - 1) : 0.0;
  double blend = spec.mode_blend_bottom + t * (spec.mode_blend_top - spec.mode_blend_bottom);
  auto ev = spec.eigenvalues;
  if (spec.kind != FieldKind::helical && blend != 0.0)
    ev[1] = ev[1] + blend * ((ev[0] + ev[2]) / 2.0 - ev[1]);
  return ev;
}

}  // namespace

FloatVolume generate_tensors(const SyntheticSpec& spec) {
  validate(spec);
  FloatVolume vol;
  vol.allocate(spec.dims, 6, {VolumeKind::tensor6, 0}, spec.spacing);
  parallel_for(static_cast<std::int64_t>(vol.voxel_count()), [&](std::int64_t v) {
    int nx = spec.dims[0], ny = spec.dims[1];
    int i = static_cast<int>(v % nx);
    int j = static_cast<int>((v / nx) % ny);
    int k = static_cast<int>(v / (static_cast<std::int64_t>(nx) * ny));
    Mat3 q = orientation_at(spec, i, j, k);
    Mat3 d;
    if (frobenius_norm(q) == 0.0) {
      // singular center: isotropic tensor with the same mean diffusivity
      double md = (spec.eigenvalues[0] + spec.eigenvalues[1] + spec.eigenvalues[2]) / 3.0;
      d = Mat3::diagonal(md, md, md);
    } else {
      auto ev = eigenvalues_at(spec, j);
      d = q * Mat3::diagonal(ev[0], ev[1], ev[2]) * transpose(q);
    }
    tfa::set_tensor(vol, i, j, k, d);
  });
  return vol;
}

PeakField ground_truth_peaks(const SyntheticSpec& spec) {
  validate(spec);
  PeakField out;
  out.allocate(spec.dims, 1, spec.spacing);
  for (int k = 0; k < spec.dims[2]; ++k)
    for (int j = 0; j < spec.dims[1]; ++j)
      for (int i = 0; i < spec.dims[0]; ++i) {
        Mat3 q = orientation_at(spec, i, j, k);
        if (frobenius_norm(q) == 0.0) continue;  // singular center stays empty
        WeightedDirector d{q.col(0), spec.eigenvalues[0]};
        out.set_peaks(i, j, k, std::span<const WeightedDirector>{&d, 1});
      }
  return out;
}

namespace {

template <class Loop>
FloatVolume odf_volume_impl(const FloatVolume& tensors, int max_order, Loop&& loop) {
  expect_tag(tensors.tag, VolumeKind::tensor6, "odf_sh_volume");
  const SphereMesh& mesh = antipodal_icosphere(3);
  static std::mutex mu;
  static std::map<int, sh::FitOperator> ops;
  const sh::FitOperator* op;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = ops.find(max_order);
    if (it == ops.end())
      it = ops.emplace(max_order, sh::FitOperator(mesh.vertices, max_order)).first;
    op = &it->second;
  }

  FloatVolume out;
  out.allocate(tensors.dims, sh::coeff_count(max_order), {VolumeKind::sh, max_order},
               tensors.spacing);
  loop(static_cast<std::int64_t>(tensors.voxel_count()), [&](std::int64_t v) {
    int nx = tensors.dims[0], ny = tensors.dims[1];
    int i = static_cast<int>(v % nx);
    int j = static_cast<int>((v / nx) % ny);
    int k = static_cast<int>(v / (static_cast<std::int64_t>(nx) * ny));
    Mat3 d = tfa::tensor_at(tensors, i, j, k);
    std::vector<double> samples(mesh.vertices.size());
    try {
      for (std::size_t s = 0; s < mesh.vertices.size(); ++s)
        samples[s] = sh::tensor_odf(d, mesh.vertices[s]);
    } catch (const std::invalid_argument& e) {
      throw numeric_error(std::string(e.what()) + " at voxel " + voxel_str(i, j, k));
    }
    sh::SHCoefficients c = op->apply(samples);
    float* p = out.at(i, j, k);
    for (int q = 0; q < out.ncomp; ++q) p[q] = static_cast<float>(c.c[q]);
  });
  return out;
}

}  // namespace

FloatVolume odf_sh_volume(const FloatVolume& tensor_volume, int max_order) {
  return odf_volume_impl(tensor_volume, max_order,
                         [](std::int64_t n, auto&& f) { parallel_for(n, f); });
}

FloatVolume odf_sh_volume_serial(const FloatVolume& tensor_volume, int max_order) {
  return odf_volume_impl(tensor_volume, max_order,
                         [](std::int64_t n, auto&& f) { serial_for(n, f); });
}

}  // namespace dfa::synth
