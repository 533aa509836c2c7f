#include "dfa/distortion.hpp"

#include <cmath>
#include <stdexcept>

#include "dfa/parallel.hpp"

namespace dfa::distortion {

namespace {

int clampi(int v, int hi) { return v < 0 ? 0 : (v >= hi ? hi - 1 : v); }

// Principal director at a clamped grid offset; false when the frame there is
// absent.
bool u1_at(const FrameField& frames, int i, int j, int k, Vec3& out) {
  const LocalFrame& f = frames.at(clampi(i, frames.dims[0]), clampi(j, frames.dims[1]),
                                  clampi(k, frames.dims[2]));
  if (f.state == FrameState::absent) return false;
  out = f.u1;
  return true;
}

// Per-axis rotation of the principal director: from the normalized mean of
// the two axis neighbors to the forward neighbor.
bool axis_rotation(const FrameField& frames, int i, int j, int k, int axis, Mat3& R) {
  std::array<int, 3> fw{i, j, k}, bw{i, j, k};
  fw[axis] += 1;
  bw[axis] -= 1;
  Vec3 v1, v0;
  if (!u1_at(frames, fw[0], fw[1], fw[2], v1) || !u1_at(frames, bw[0], bw[1], bw[2], v0)) {
    R = Mat3::identity();
    return false;
  }
  Vec3 v2 = dot(v1, v0) >= 0.0 ? (v1 + v0) * 0.5 : (v1 - v0) * 0.5;
  double n = norm(v2);
  if (n < 1e-12) {
    // orthogonal neighbors collapse the mean: no stable rotation
    R = Mat3::identity();
    return false;
  }
  R = rotation_between_unit(v2 / n, v1);
  return true;
}

struct AxisRotations {
  std::array<Mat3, 3> R;
  bool degraded = false;
};

AxisRotations axis_rotations(const FrameField& frames, int i, int j, int k,
                             const DerivativeOptions& opts) {
  AxisRotations out;
  for (int a = 0; a < 3; ++a) {
    if (!axis_rotation(frames, i, j, k, a, out.R[a])) out.degraded = true;
    if (opts.spacing_normalize) {
      double s = frames.spacing[a];
      if (s <= 0.0) throw std::invalid_argument("spacing must be positive");
      if (s != 1.0) out.R[a] = rotation_scale_angle(out.R[a], 1.0 / s);
    }
  }
  return out;
}

// Transport of u1 along frame axis u (one lattice step in each direction)
// and the sign-resolved difference. The unit normalization of the two
// transported directors shrinks the step by the sum of |u_i| blend weights,
// so the difference is rescaled by it; the trailing /2 is the usual central
// difference half-step.
Vec3 transported_derivative(const std::array<Mat3, 3>& R, const Vec3& u1, const Vec3& u) {
  Vec3 p{}, n{};
  double wsum = 0.0;
  for (int a = 0; a < 3; ++a) {
    double w = u[a];
    wsum += std::fabs(w);
    if (w >= 0.0) {
      p += w * (R[a] * u1);
      n += w * (transpose(R[a]) * u1);
    } else {
      p += -w * (transpose(R[a]) * u1);
      n += -w * (R[a] * u1);
    }
  }
  double np = norm(p), nn = norm(n);
  if (np < 1e-300 || nn < 1e-300) return {};
  p = p / np;
  n = n / nn;
  Vec3 diff = norm(p - n) <= norm(p + n) ? p - n : p + n;
  return diff * (wsum / 2.0);
}

}  // namespace

PrincipalDerivatives principal_directional_derivatives(const FrameField& frames, int i, int j,
                                                       int k, const DerivativeOptions& opts) {
  const LocalFrame& f = frames.at(i, j, k);
  if (f.state != FrameState::full)
    throw std::invalid_argument("principal_directional_derivatives: derivative undefined " +
                                voxel_str(i, j, k));
  AxisRotations rot = axis_rotations(frames, i, j, k, opts);
  PrincipalDerivatives out;
  out.degraded = rot.degraded;
  const Vec3 axes[3] = {f.u1, f.u2, f.u3};
  for (int a = 0; a < 3; ++a) out.d[a] = transported_derivative(rot.R, f.u1, axes[a]);
  return out;
}

ConnectionForm connections(const FrameField& frames, int i, int j, int k,
                           const DerivativeOptions& opts) {
  const LocalFrame& f = frames.at(i, j, k);
  PrincipalDerivatives d = principal_directional_derivatives(frames, i, j, k, opts);
  ConnectionForm out;
  out.degraded = d.degraded;
  const Vec3 proj[2] = {f.u2, f.u3};
  for (int jj = 0; jj < 2; ++jj)
    for (int kk = 0; kk < 3; ++kk) out.c[jj][kk] = dot(proj[jj], d.d[kk]);
  return out;
}

DistortionIndices distortion_indices(const FrameField& frames, int i, int j, int k,
                                     const DerivativeOptions& opts) {
  DistortionIndices out;
  const LocalFrame& f = frames.at(i, j, k);
  if (f.state != FrameState::full) return out;  // zeros, valid = false
  ConnectionForm c = connections(frames, i, j, k, opts);
  out.valid = true;
  out.degraded = c.degraded;
  // indices combine the squared connection scalars, which removes the
  // leftover sign ambiguity of the frame axes
  double c122 = c.c[0][1], c133 = c.c[1][2];
  double c121 = c.c[0][0], c131 = c.c[1][0];
  double c123 = c.c[0][2], c132 = c.c[1][1];
  out.splay = std::sqrt(c122 * c122 + c133 * c133);
  out.bend = std::sqrt(c121 * c121 + c131 * c131);
  out.twist = std::sqrt(c123 * c123 + c132 * c132);
  out.total = std::sqrt(out.splay * out.splay + out.bend * out.bend + out.twist * out.twist);
  return out;
}

namespace {

template <class Loop>
DistortionMaps maps_impl(const FrameField& frames, const DerivativeOptions& opts, Loop&& loop) {
  DistortionMaps maps;
  VolumeTag scalar{VolumeKind::scalar, 0};
  maps.splay.allocate(frames.dims, 1, scalar, frames.spacing);
  maps.bend.allocate(frames.dims, 1, scalar, frames.spacing);
  maps.twist.allocate(frames.dims, 1, scalar, frames.spacing);
  maps.total.allocate(frames.dims, 1, scalar, frames.spacing);
  maps.flags.allocate(frames.dims, 1, {VolumeKind::mask, 0}, frames.spacing);

  loop(static_cast<std::int64_t>(frames.voxel_count()), [&](std::int64_t v) {
    int nx = frames.dims[0], ny = frames.dims[1];
    int i = static_cast<int>(v % nx);
    int j = static_cast<int>((v / nx) % ny);
    int k = static_cast<int>(v / (static_cast<std::int64_t>(nx) * ny));
    DistortionIndices idx = distortion_indices(frames, i, j, k, opts);
    maps.splay.data[v] = static_cast<float>(idx.splay);
    maps.bend.data[v] = static_cast<float>(idx.bend);
    maps.twist.data[v] = static_cast<float>(idx.twist);
    maps.total.data[v] = static_cast<float>(idx.total);
    maps.flags.data[v] =
        static_cast<std::uint8_t>((idx.valid ? 1 : 0) | (idx.degraded ? 2 : 0));
  });
  return maps;
}

}  // namespace

DistortionMaps distortion_maps(const FrameField& frames, const DerivativeOptions& opts) {
  return maps_impl(frames, opts, [](std::int64_t n, auto&& f) { parallel_for(n, f); });
}

DistortionMaps distortion_maps_serial(const FrameField& frames, const DerivativeOptions& opts) {
  return maps_impl(frames, opts, [](std::int64_t n, auto&& f) { serial_for(n, f); });
}

ScaledRotation resolution_scaled_rotation(const FrameField& frames, int i, int j, int k,
                                          int axis, double spacing_mm, double window_mm) {
  if (spacing_mm <= 0.0)
    throw std::invalid_argument("resolution_scaled_rotation: spacing must be positive");
  ScaledRotation out;
  Mat3 r1;
  if (!axis_rotation(frames, i, j, k, axis, r1)) {
    out.defined = false;
    return out;
  }
  if (window_mm >= 2.0 * spacing_mm) {
    // Combine the angle-doubled one-step rotation with the two-step one,
    // both spanning two voxels, then normalize over that span.
    Mat3 r1d = rotation_scale_angle(r1, 2.0);
    std::array<int, 3> fw{i, j, k}, bw{i, j, k};
    fw[axis] += 2;
    bw[axis] -= 2;
    Vec3 v1, v0;
    bool have2 = u1_at(frames, fw[0], fw[1], fw[2], v1) && u1_at(frames, bw[0], bw[1], bw[2], v0);
    Mat3 r2 = Mat3::identity();
    bool ok2 = false;
    if (have2) {
      Vec3 v2 = dot(v1, v0) >= 0.0 ? (v1 + v0) * 0.5 : (v1 - v0) * 0.5;
      double n = norm(v2);
      if (n >= 1e-12) {
        r2 = rotation_between_unit(v2 / n, v1);
        ok2 = true;
      }
    }
    Mat3 combined = ok2 ? rotation_mean(r1d, r2) : r1d;
    out.rotation = rotation_scale_angle(combined, 1.0 / (2.0 * spacing_mm));
    if (!ok2) out.defined = false;
    return out;
  }
  out.rotation = rotation_scale_angle(r1, 1.0 / spacing_mm);
  return out;
}

}  // namespace dfa::distortion
