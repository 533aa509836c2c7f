#pragma once

#include "dfa/director.hpp"
#include "dfa/frames.hpp"
#include "dfa/volume.hpp"

namespace dfa::distortion {

struct DerivativeOptions {
  // When set, per-axis rotation angles are divided by the physical voxel
  // spacing before transport, making the derivatives (and all indices)
  // mm^-1. Otherwise everything is in voxel^-1 units (the two coincide at
  // unit spacing).
  bool spacing_normalize = false;
};

struct PrincipalDerivatives {
  // d[i] = directional derivative of u1 along frame axis u_{i+1}.
  std::array<Vec3, 3> d{};
  // A neighbor u1 was missing on some axis; that rotation was replaced by
  // the identity.
  bool degraded = false;
};

// Directional derivatives of the principal director along the local frame
// axes, via sign-conditional rotation transport of central-difference
// rotations. Requires a full frame at x; neighbor principal directors come
// from the six axis neighbors with a replicate boundary.
PrincipalDerivatives principal_directional_derivatives(const FrameField& frames, int i, int j,
                                                       int k, const DerivativeOptions& opts = {});

struct ConnectionForm {
  // c[j][k] = u_{j+2}^T d u1 / d u_{k+1}, j in {0,1} for u2/u3, k in 0..2.
  std::array<std::array<double, 3>, 2> c{};
  bool degraded = false;
};

ConnectionForm connections(const FrameField& frames, int i, int j, int k,
                           const DerivativeOptions& opts = {});

struct DistortionIndices {
  double splay = 0, bend = 0, twist = 0, total = 0;
  bool valid = false;     // full frame present
  bool degraded = false;  // some axis rotation fell back to identity
};

// Index values from the connection scalars; partial frames report zeros with
// valid = false rather than throwing.
DistortionIndices distortion_indices(const FrameField& frames, int i, int j, int k,
                                     const DerivativeOptions& opts = {});

struct DistortionMaps {
  FloatVolume splay, bend, twist, total;
  MaskVolume flags;  // bit 0: valid, bit 1: degraded
};

DistortionMaps distortion_maps(const FrameField& frames, const DerivativeOptions& opts = {});
DistortionMaps distortion_maps_serial(const FrameField& frames,
                                      const DerivativeOptions& opts = {});

// Central-difference rotation along a grid axis with its angle normalized by
// the physical step. When window_mm spans at least two voxels, the one-step
// estimate (angle doubled) and the two-step estimate are combined by the
// rotation-group geodesic mean before normalizing.
ScaledRotation resolution_scaled_rotation(const FrameField& frames, int i, int j, int k,
                                          int axis, double spacing_mm, double window_mm = 0.0);

}  // namespace dfa::distortion
