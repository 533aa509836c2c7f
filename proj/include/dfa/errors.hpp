#pragma once

#include <stdexcept>
#include <string>

namespace dfa {

struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical failure in a field kernel; the message names the voxel.
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct usage_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::string voxel_str(int i, int j, int k) {
  return "(" + std::to_string(i) + "," + std::to_string(j) + "," + std::to_string(k) + ")";
}

}  // namespace dfa
