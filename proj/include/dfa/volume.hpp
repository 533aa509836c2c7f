#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "dfa/errors.hpp"

namespace dfa {

// Component semantics carried through volume files.
enum class VolumeKind : std::uint8_t {
  scalar,   // 1 component
  sh,       // (L+1)(L+2)/2 components, param = L
  tensor6,  // upper-triangular Dxx,Dxy,Dxz,Dyy,Dyz,Dzz
  peaks,    // 4K components as (x,y,z,weight) x K, zero padded, param = K
  frame9,   // u1,u2,u3 row-major
  mask,     // 1 component, uint8
};

struct VolumeTag {
  VolumeKind kind = VolumeKind::scalar;
  int param = 0;  // L for sh, K for peaks

  std::string str() const;
  static VolumeTag parse(const std::string& s);
  int component_count() const;
};

// Dense grid with ncomp values per voxel, components fastest in memory.
template <class T>
struct Volume {
  std::array<int, 3> dims{0, 0, 0};
  std::array<double, 3> spacing{1.0, 1.0, 1.0};
  int ncomp = 1;
  VolumeTag tag;
  std::vector<T> data;

  std::size_t voxel_count() const {
    return static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
  }
  std::size_t index(int i, int j, int k) const {
    return ((static_cast<std::size_t>(k) * dims[1] + j) * dims[0] + i) * ncomp;
  }
  T* at(int i, int j, int k) { return data.data() + index(i, j, k); }
  const T* at(int i, int j, int k) const { return data.data() + index(i, j, k); }

  void allocate(std::array<int, 3> d, int nc, VolumeTag t,
                std::array<double, 3> sp = {1, 1, 1}) {
    dims = d;
    ncomp = nc;
    tag = t;
    spacing = sp;
    data.assign(voxel_count() * ncomp, T{});
  }
};

using FloatVolume = Volume<float>;
using MaskVolume = Volume<std::uint8_t>;

// Verify that a loaded volume carries the expected semantics; throws
// usage_error naming the expected tag otherwise.
void expect_tag(const VolumeTag& actual, VolumeKind expected_kind,
                const std::string& context);

}  // namespace dfa
