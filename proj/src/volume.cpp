#include "dfa/volume.hpp"

#include "dfa/sh.hpp"

namespace dfa {

std::string VolumeTag::str() const {
  switch (kind) {
    case VolumeKind::scalar: return "scalar";
    case VolumeKind::sh: return "sh:" + std::to_string(param);
    case VolumeKind::tensor6: return "tensor6";
    case VolumeKind::peaks: return "peaks:" + std::to_string(param);
    case VolumeKind::frame9: return "frame9";
    case VolumeKind::mask: return "mask";
  }
  return "scalar";
}

VolumeTag VolumeTag::parse(const std::string& s) {
  auto with_param = [&](const std::string& prefix, VolumeKind k) -> VolumeTag {
    int p = std::stoi(s.substr(prefix.size()));
    if (p <= 0) throw io_error("volume tag '" + s + "' has a non-positive parameter");
    return {k, p};
  };
  if (s == "scalar") return {VolumeKind::scalar, 0};
  if (s == "tensor6") return {VolumeKind::tensor6, 0};
  if (s == "frame9") return {VolumeKind::frame9, 0};
  if (s == "mask") return {VolumeKind::mask, 0};
  if (s.rfind("sh:", 0) == 0) return with_param("sh:", VolumeKind::sh);
  if (s.rfind("peaks:", 0) == 0) return with_param("peaks:", VolumeKind::peaks);
  throw io_error("unknown volume tag '" + s + "'");
}

int VolumeTag::component_count() const {
  switch (kind) {
    case VolumeKind::scalar: return 1;
    case VolumeKind::sh: return sh::coeff_count(param);
    case VolumeKind::tensor6: return 6;
    case VolumeKind::peaks: return 4 * param;
    case VolumeKind::frame9: return 9;
    case VolumeKind::mask: return 1;
  }
  return 1;
}

void expect_tag(const VolumeTag& actual, VolumeKind expected_kind,
                const std::string& context) {
  if (actual.kind != expected_kind) {
    VolumeTag want{expected_kind, actual.param};
    throw usage_error(context + ": expected a '" +
                      (expected_kind == VolumeKind::sh      ? std::string("sh:L")
                       : expected_kind == VolumeKind::peaks ? std::string("peaks:K")
                                                            : want.str()) +
                      "' volume, got '" + actual.str() + "'");
  }
}

}  // namespace dfa
