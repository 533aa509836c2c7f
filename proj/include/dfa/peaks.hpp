#pragma once

#include <span>
#include <vector>

#include "dfa/director.hpp"
#include "dfa/sh.hpp"
#include "dfa/volume.hpp"

namespace dfa {

// Detected ODF maxima per voxel on a 3D grid: a discrete director field.
// Peaks are stored in fixed-size slots (k_max per voxel), descending weight,
// with the principal peak first.
struct PeakField {
  std::array<int, 3> dims{0, 0, 0};
  std::array<double, 3> spacing{1, 1, 1};
  int k_max = 3;
  std::vector<std::uint8_t> counts;
  std::vector<WeightedDirector> slots;

  std::size_t voxel_count() const {
    return static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
  }
  std::size_t voxel_index(int i, int j, int k) const {
    return (static_cast<std::size_t>(k) * dims[1] + j) * dims[0] + i;
  }
  void allocate(std::array<int, 3> d, int kmax, std::array<double, 3> sp = {1, 1, 1}) {
    dims = d;
    k_max = kmax;
    spacing = sp;
    counts.assign(voxel_count(), 0);
    slots.assign(voxel_count() * kmax, WeightedDirector{});
  }
  std::span<const WeightedDirector> peaks_at(int i, int j, int k) const {
    std::size_t v = voxel_index(i, j, k);
    return {slots.data() + v * k_max, counts[v]};
  }
  void set_peaks(int i, int j, int k, std::span<const WeightedDirector> p) {
    std::size_t v = voxel_index(i, j, k);
    int n = std::min<int>(k_max, static_cast<int>(p.size()));
    counts[v] = static_cast<std::uint8_t>(n);
    for (int s = 0; s < n; ++s) slots[v * k_max + s] = p[s];
  }
};

// Per-voxel SH coefficients pulled out of an sh:L volume.
sh::SHCoefficients sh_at_voxel(const FloatVolume& vol, int i, int j, int k);

// Peak detection over a whole SH volume (OpenMP kernel + serial reference).
PeakField detect_peak_field(const FloatVolume& sh_volume, const sh::PeakOptions& opts,
                            int max_peaks);
PeakField detect_peak_field_serial(const FloatVolume& sh_volume, const sh::PeakOptions& opts,
                                   int max_peaks);

// Peak extraction from a tensor volume: the principal eigen-director
// (weight = principal eigenvalue) wherever FA exceeds the threshold.
PeakField peaks_from_tensor_volume(const FloatVolume& tensor_volume, double fa_threshold);

// peaks:K volume round-trip.
FloatVolume peaks_to_volume(const PeakField& field);
PeakField peaks_from_volume(const FloatVolume& volume);

}  // namespace dfa
