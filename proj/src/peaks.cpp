#include "dfa/peaks.hpp"

#include <algorithm>
#include <cmath>

#include "dfa/eig3.hpp"
#include "dfa/parallel.hpp"
#include "dfa/tfa.hpp"

namespace dfa {

sh::SHCoefficients sh_at_voxel(const FloatVolume& vol, int i, int j, int k) {
  if (vol.tag.kind != VolumeKind::sh)
    throw usage_error("sh_at_voxel: volume is not tagged sh:L");
  sh::SHCoefficients c;
  c.max_order = vol.tag.param;
  const float* p = vol.at(i, j, k);
  c.c.assign(p, p + vol.ncomp);
  return c;
}

namespace {

void detect_at_voxel(const FloatVolume& vol, const sh::PeakOptions& opts, int max_peaks,
                     PeakField& out, std::int64_t v) {
  int nx = vol.dims[0], ny = vol.dims[1];
  int i = static_cast<int>(v % nx);
  int j = static_cast<int>((v / nx) % ny);
  int k = static_cast<int>(v / (static_cast<std::int64_t>(nx) * ny));
  sh::SHCoefficients c = sh_at_voxel(vol, i, j, k);
  std::vector<WeightedDirector> peaks = sh::detect_peaks(c, opts);
  if (static_cast<int>(peaks.size()) > max_peaks) peaks.resize(max_peaks);
  out.set_peaks(i, j, k, peaks);
}

}  // namespace

PeakField detect_peak_field(const FloatVolume& sh_volume, const sh::PeakOptions& opts,
                            int max_peaks) {
  expect_tag(sh_volume.tag, VolumeKind::sh, "peak detection");
  PeakField out;
  out.allocate(sh_volume.dims, max_peaks, sh_volume.spacing);
  // warm the shared mesh cache before the parallel region
  antipodal_icosphere(opts.mesh_level);
  parallel_for(static_cast<std::int64_t>(out.voxel_count()), [&](std::int64_t v) {
    detect_at_voxel(sh_volume, opts, max_peaks, out, v);
  });
  return out;
}

PeakField detect_peak_field_serial(const FloatVolume& sh_volume, const sh::PeakOptions& opts,
                                   int max_peaks) {
  expect_tag(sh_volume.tag, VolumeKind::sh, "peak detection");
  PeakField out;
  out.allocate(sh_volume.dims, max_peaks, sh_volume.spacing);
  serial_for(static_cast<std::int64_t>(out.voxel_count()), [&](std::int64_t v) {
    detect_at_voxel(sh_volume, opts, max_peaks, out, v);
  });
  return out;
}

PeakField peaks_from_tensor_volume(const FloatVolume& tensor_volume, double fa_threshold) {
  expect_tag(tensor_volume.tag, VolumeKind::tensor6, "tensor peak extraction");
  PeakField out;
  out.allocate(tensor_volume.dims, 1, tensor_volume.spacing);
  parallel_for(static_cast<std::int64_t>(out.voxel_count()), [&](std::int64_t v) {
    int nx = tensor_volume.dims[0], ny = tensor_volume.dims[1];
    int i = static_cast<int>(v % nx);
    int j = static_cast<int>((v / nx) % ny);
    int k = static_cast<int>(v / (static_cast<std::int64_t>(nx) * ny));
    Mat3 D = tfa::tensor_at(tensor_volume, i, j, k);
    SymmetricEigen3 e = eigen_symmetric(D);
    if (e.values[2] <= 0.0) return;  // not SPD: skip voxel
    if (tfa::fractional_anisotropy(e.values) <= fa_threshold) return;
    WeightedDirector d{e.vectors[0], e.values[0]};
    out.set_peaks(i, j, k, std::span<const WeightedDirector>{&d, 1});
  });
  return out;
}

FloatVolume peaks_to_volume(const PeakField& field) {
  FloatVolume vol;
  vol.allocate(field.dims, 4 * field.k_max, {VolumeKind::peaks, field.k_max}, field.spacing);
  for (int k = 0; k < field.dims[2]; ++k)
    for (int j = 0; j < field.dims[1]; ++j)
      for (int i = 0; i < field.dims[0]; ++i) {
        float* p = vol.at(i, j, k);
        for (const WeightedDirector& d : field.peaks_at(i, j, k)) {
          p[0] = static_cast<float>(d.axis.x);
          p[1] = static_cast<float>(d.axis.y);
          p[2] = static_cast<float>(d.axis.z);
          p[3] = static_cast<float>(d.weight);
          p += 4;
        }
      }
  return vol;
}

PeakField peaks_from_volume(const FloatVolume& volume) {
  expect_tag(volume.tag, VolumeKind::peaks, "peak field input");
  PeakField field;
  field.allocate(volume.dims, volume.tag.param, volume.spacing);
  std::vector<WeightedDirector> buf;
  for (int k = 0; k < volume.dims[2]; ++k)
    for (int j = 0; j < volume.dims[1]; ++j)
      for (int i = 0; i < volume.dims[0]; ++i) {
        buf.clear();
        const float* p = volume.at(i, j, k);
        for (int s = 0; s < field.k_max; ++s) {
          Vec3 axis{p[4 * s], p[4 * s + 1], p[4 * s + 2]};
          double w = p[4 * s + 3];
          double n = norm(axis);
          if (n < 0.5) break;  // zero padding marks the end
          buf.push_back({axis / n, w});
        }
        field.set_peaks(i, j, k, buf);
      }
  return field;
}

}  // namespace dfa
