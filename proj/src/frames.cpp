#include "dfa/frames.hpp"

#include <cmath>
#include <stdexcept>

#include "dfa/eig3.hpp"
#include "dfa/parallel.hpp"

namespace dfa {

namespace {

double spatial_weight(const FrameOptions& opts, int di, int dj, int dk) {
  if (opts.spatial_weight)
    return opts.spatial_weight({double(di), double(dj), double(dk)});
  double inv2s2 = 1.0 / (2.0 * opts.sigma_voxels * opts.sigma_voxels);
  return std::exp(-(di * di + dj * dj + dk * dk) * inv2s2);
}

}  // namespace

Mat3 projected_orientational_tensor(const PeakField& peaks, int i, int j, int k,
                                    const FrameOptions& opts) {
  auto principal = peaks.peaks_at(i, j, k);
  if (principal.empty())
    throw std::invalid_argument("projected_orientational_tensor: frame undefined (no peak)");
  const Vec3 u1 = principal.front().axis;

  Mat3 q;
  const int r = opts.radius_voxels;
  for (int dk = -r; dk <= r; ++dk)
    for (int dj = -r; dj <= r; ++dj)
      for (int di = -r; di <= r; ++di) {
        int ni = i + di, nj = j + dj, nk = k + dk;
        if (ni < 0 || nj < 0 || nk < 0 || ni >= peaks.dims[0] || nj >= peaks.dims[1] ||
            nk >= peaks.dims[2])
          continue;
        double w = spatial_weight(opts, di, dj, dk);
        for (const WeightedDirector& p : peaks.peaks_at(ni, nj, nk)) {
          Vec3 perp = p.axis - dot(p.axis, u1) * u1;
          q += outer(perp, perp) * (w * p.weight);
        }
      }
  return q;
}

namespace {

LocalFrame frame_from_projection(const PeakField& peaks, int i, int j, int k,
                                 const FrameOptions& opts) {
  LocalFrame f;
  auto at = peaks.peaks_at(i, j, k);
  if (at.empty()) return f;  // absent

  f.u1 = at.front().axis;
  f.state = FrameState::partial;

  if (opts.vector_mode) {
    // Sign-resolved peaks: the projected vectors carry direction information,
    // so u2 comes from their (weighted) mean or the largest projection.
    const int r = opts.radius_voxels;
    Vec3 mean{};
    Vec3 best{};
    double best_mag = 0.0;
    for (int dk = -r; dk <= r; ++dk)
      for (int dj = -r; dj <= r; ++dj)
        for (int di = -r; di <= r; ++di) {
          int ni = i + di, nj = j + dj, nk = k + dk;
          if (ni < 0 || nj < 0 || nk < 0 || ni >= peaks.dims[0] || nj >= peaks.dims[1] ||
              nk >= peaks.dims[2])
            continue;
          double w = spatial_weight(opts, di, dj, dk);
          for (const WeightedDirector& p : peaks.peaks_at(ni, nj, nk)) {
            Vec3 perp = (p.axis - dot(p.axis, f.u1) * f.u1) * (w * p.weight);
            mean += perp;
            if (norm(perp) > best_mag) {
              best_mag = norm(perp);
              best = perp;
            }
          }
        }
    Vec3 pick = opts.vector_mode_max ? best : mean;
    if (norm(pick) < 1e-12) return f;  // no in-plane change: keep partial
    f.u2 = normalized(pick);
    f.u3 = cross(f.u1, f.u2);
    f.state = FrameState::full;
    return f;
  }

  Mat3 q = projected_orientational_tensor(peaks, i, j, k, opts);
  SymmetricEigen3 e = eigen_symmetric(q);
  int top = std::fabs(e.values[0]) >= std::fabs(e.values[2]) ? 0 : 2;
  int other = top == 0 ? 2 : 0;
  int second = std::fabs(e.values[1]) >= std::fabs(e.values[other]) ? 1 : other;
  double ref = std::max(std::fabs(e.values[top]), 1e-30);
  if (std::fabs(std::fabs(e.values[top]) - std::fabs(e.values[second])) < opts.tie_rel_tol * ref)
    return f;  // tie: u2 and u3 stay zero

  f.u2 = e.vectors[top];
  f.u3 = normalized(cross(f.u1, f.u2));
  f.state = FrameState::full;
  return f;
}

}  // namespace

LocalFrame local_frame(const PeakField& peaks, int i, int j, int k, const FrameOptions& opts) {
  if (peaks.peaks_at(i, j, k).empty())
    throw std::invalid_argument("local_frame: frame undefined (no peak)");
  return frame_from_projection(peaks, i, j, k, opts);
}

namespace {

template <class Loop>
FrameField frame_field_impl(const PeakField& peaks, const FrameOptions& opts, Loop&& loop) {
  FrameField out;
  out.allocate(peaks.dims, peaks.spacing);
  loop(static_cast<std::int64_t>(out.voxel_count()), [&](std::int64_t v) {
    int nx = peaks.dims[0], ny = peaks.dims[1];
    int i = static_cast<int>(v % nx);
    int j = static_cast<int>((v / nx) % ny);
    int k = static_cast<int>(v / (static_cast<std::int64_t>(nx) * ny));
    out.frames[v] = frame_from_projection(peaks, i, j, k, opts);
  });
  return out;
}

}  // namespace

FrameField frame_field(const PeakField& peaks, const FrameOptions& opts) {
  return frame_field_impl(peaks, opts,
                          [](std::int64_t n, auto&& f) { parallel_for(n, f); });
}

FrameField frame_field_serial(const PeakField& peaks, const FrameOptions& opts) {
  return frame_field_impl(peaks, opts,
                          [](std::int64_t n, auto&& f) { serial_for(n, f); });
}

FloatVolume frames_to_volume(const FrameField& field) {
  FloatVolume vol;
  vol.allocate(field.dims, 9, {VolumeKind::frame9, 0}, field.spacing);
  for (std::size_t v = 0; v < field.voxel_count(); ++v) {
    const LocalFrame& f = field.frames[v];
    float* p = vol.data.data() + v * 9;
    const Vec3* axes[3] = {&f.u1, &f.u2, &f.u3};
    for (int a = 0; a < 3; ++a)
      for (int c = 0; c < 3; ++c) p[3 * a + c] = static_cast<float>((*axes[a])[c]);
  }
  return vol;
}

MaskVolume frames_validity_mask(const FrameField& field) {
  MaskVolume mask;
  mask.allocate(field.dims, 1, {VolumeKind::mask, 0}, field.spacing);
  for (std::size_t v = 0; v < field.voxel_count(); ++v)
    mask.data[v] = field.frames[v].state == FrameState::absent ? 0 : 1;
  return mask;
}

FrameField frames_from_volume(const FloatVolume& volume) {
  expect_tag(volume.tag, VolumeKind::frame9, "frame field input");
  FrameField field;
  field.allocate(volume.dims, volume.spacing);
  for (std::size_t v = 0; v < field.voxel_count(); ++v) {
    const float* p = volume.data.data() + v * 9;
    LocalFrame f;
    f.u1 = {p[0], p[1], p[2]};
    f.u2 = {p[3], p[4], p[5]};
    f.u3 = {p[6], p[7], p[8]};
    double n1 = norm(f.u1);
    if (n1 < 0.5) {
      f.state = FrameState::absent;
    } else {
      f.u1 = f.u1 / n1;
      if (norm(f.u2) < 0.5) {
        f.state = FrameState::partial;
        f.u2 = {};
        f.u3 = {};
      } else {
        f.state = FrameState::full;
        f.u2 = normalized(f.u2);
        f.u3 = normalized(f.u3);
      }
    }
    field.frames[v] = f;
  }
  return field;
}

}  // namespace dfa
