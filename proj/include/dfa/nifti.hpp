#pragma once

#include <string>
#include <variant>

#include "dfa/volume.hpp"

namespace dfa::nifti {

// Single-file little-endian NIfTI-1 (.nii), float32 payloads for data
// volumes and uint8 for masks. Components are stored along the fourth
// dimension; the semantics tag rides in the descrip field as "dfa:<tag>".
// Files outside that subset produce explicit errors.

void write(const std::string& path, const FloatVolume& volume);
void write(const std::string& path, const MaskVolume& volume);

using AnyVolume = std::variant<FloatVolume, MaskVolume>;

AnyVolume read(const std::string& path);

// Convenience wrappers that also check the payload type.
FloatVolume read_float(const std::string& path);
MaskVolume read_mask(const std::string& path);

}  // namespace dfa::nifti
