#pragma once

#include <functional>
#include <vector>

#include "dfa/peaks.hpp"
#include "dfa/vec3.hpp"
#include "dfa/volume.hpp"

namespace dfa {

// Per-voxel orthogonal director triple. u1 is the principal peak; u2 the
// main in-plane direction of projected neighborhood peaks; u3 their cross
// product. A partial frame keeps u1 and zeroes u2/u3 when the in-plane
// eigenvalues tie.
enum class FrameState : std::uint8_t { absent = 0, partial = 1, full = 2 };

struct LocalFrame {
  FrameState state = FrameState::absent;
  Vec3 u1{}, u2{}, u3{};
};

struct FrameField {
  std::array<int, 3> dims{0, 0, 0};
  std::array<double, 3> spacing{1, 1, 1};
  std::vector<LocalFrame> frames;

  std::size_t voxel_count() const {
    return static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
  }
  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(k) * dims[1] + j) * dims[0] + i;
  }
  const LocalFrame& at(int i, int j, int k) const { return frames[index(i, j, k)]; }
  LocalFrame& at(int i, int j, int k) { return frames[index(i, j, k)]; }
  void allocate(std::array<int, 3> d, std::array<double, 3> sp = {1, 1, 1}) {
    dims = d;
    spacing = sp;
    frames.assign(voxel_count(), LocalFrame{});
  }
};

struct FrameOptions {
  double sigma_voxels = 1.0;   // Gaussian weight concentration
  int radius_voxels = 1;       // cubic neighborhood half-width
  double tie_rel_tol = 1e-6;   // in-plane eigenvalue tie -> partial frame
  bool vector_mode = false;    // sign-resolved peaks (no antipodal identification)
  bool vector_mode_max = false;  // vector mode: pick max-|projection| instead of the mean
  // Hook for anisotropic spatial weighting: takes the neighbor offset in
  // voxels and replaces the default isotropic Gaussian when set. No
  // anisotropic policy is shipped.
  std::function<double(const Vec3& offset_voxels)> spatial_weight;
};

// Orientational tensor of neighborhood peaks projected to the plane
// orthogonal to the principal peak at x. Rank <= 2 by construction; the
// eigenvalue along u1 vanishes. Throws when x has no peak.
Mat3 projected_orientational_tensor(const PeakField& peaks, int i, int j, int k,
                                    const FrameOptions& opts = {});

// Frame at a single voxel; throws when no principal peak exists there.
LocalFrame local_frame(const PeakField& peaks, int i, int j, int k,
                       const FrameOptions& opts = {});

// Frame extraction over the whole grid; absent exactly where the peak field
// is empty. OpenMP kernel plus the serial reference.
FrameField frame_field(const PeakField& peaks, const FrameOptions& opts = {});
FrameField frame_field_serial(const PeakField& peaks, const FrameOptions& opts = {});

// frame9 volume (+ companion validity mask) round-trip.
FloatVolume frames_to_volume(const FrameField& field);
MaskVolume frames_validity_mask(const FrameField& field);
FrameField frames_from_volume(const FloatVolume& volume);

}  // namespace dfa
