#pragma once

#include <string>

#include "dfa/peaks.hpp"
#include "dfa/volume.hpp"

namespace dfa::synth {

enum class FieldKind {
  splay,         // up-pointing directors fanning left to right about z
  bend,          // left-pointing directors turning left to right about z
  twist,         // directors perpendicular to x rotating about x
  circle_bend,   // tangential directors around the slab center
  circle_splay,  // radial directors around the slab center
  helical,       // twist geometry without any mode sweep
};

FieldKind parse_kind(const std::string& s);

struct SyntheticSpec {
  FieldKind kind = FieldKind::twist;
  std::array<int, 3> dims{32, 16, 3};
  std::array<double, 3> spacing{1, 1, 1};
  // descending eigenvalues, mm^2/s
  std::array<double, 3> eigenvalues{1.7e-3, 0.2e-3, 0.2e-3};
  double angle_range = std::numbers::pi;  // total rotation across the x extent
  // tensor-mode sweep across rows: blend of lambda2 towards the mode-0 value
  // (lambda1+lambda3)/2, linear from bottom (j = 0) to top
  double mode_blend_bottom = 0.0;
  double mode_blend_top = 0.0;
};

// Deterministic, seedless tensor field construction. The circular kinds have
// an orientation singularity at the slab center; that voxel is written as an
// isotropic tensor so it drops out of peak extraction downstream.
FloatVolume generate_tensors(const SyntheticSpec& spec);

// The construction's exact principal directors (weight = lambda1). The axis
// computation never touches the eigenvalue sweep, so fields differing only
// in shape produce bit-identical peak fields.
PeakField ground_truth_peaks(const SyntheticSpec& spec);

// Per-voxel ODF sampling + least-squares SH fit of a tensor volume
// (OpenMP kernel + serial reference).
FloatVolume odf_sh_volume(const FloatVolume& tensor_volume, int max_order);
FloatVolume odf_sh_volume_serial(const FloatVolume& tensor_volume, int max_order);

}  // namespace dfa::synth
