#include "dfa/nifti.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "dfa/sh.hpp"

namespace dfa::nifti {

static_assert(std::endian::native == std::endian::little,
              "NIfTI writer assumes a little-endian host");

namespace {

#pragma pack(push, 1)
struct Nifti1Header {
  std::int32_t sizeof_hdr = 348;
  char data_type[10] = {};
  char db_name[18] = {};
  std::int32_t extents = 0;
  std::int16_t session_error = 0;
  char regular = 'r';
  char dim_info = 0;
  std::int16_t dim[8] = {};
  float intent_p1 = 0, intent_p2 = 0, intent_p3 = 0;
  std::int16_t intent_code = 0;
  std::int16_t datatype = 0;
  std::int16_t bitpix = 0;
  std::int16_t slice_start = 0;
  float pixdim[8] = {};
  float vox_offset = 352.0f;
  float scl_slope = 1.0f;
  float scl_inter = 0.0f;
  std::int16_t slice_end = 0;
  char slice_code = 0;
  char xyzt_units = 2;  // millimetres
  float cal_max = 0, cal_min = 0;
  float slice_duration = 0;
  float toffset = 0;
  std::int32_t glmax = 0, glmin = 0;
  char descrip[80] = {};
  char aux_file[24] = {};
  std::int16_t qform_code = 0;
  std::int16_t sform_code = 1;
  float quatern_b = 0, quatern_c = 0, quatern_d = 0;
  float qoffset_x = 0, qoffset_y = 0, qoffset_z = 0;
  float srow_x[4] = {};
  float srow_y[4] = {};
  float srow_z[4] = {};
  char intent_name[16] = {};
  char magic[4] = {'n', '+', '1', 0};
};
#pragma pack(pop)

static_assert(sizeof(Nifti1Header) == 348, "NIfTI-1 header must be 348 bytes");

constexpr std::int16_t kDtUint8 = 2;
constexpr std::int16_t kDtFloat32 = 16;

template <class T>
Nifti1Header make_header(const Volume<T>& v, std::int16_t datatype, int bits) {
  Nifti1Header h;
  bool has_components = v.ncomp > 1;
  h.dim[0] = has_components ? 4 : 3;
  h.dim[1] = static_cast<std::int16_t>(v.dims[0]);
  h.dim[2] = static_cast<std::int16_t>(v.dims[1]);
  h.dim[3] = static_cast<std::int16_t>(v.dims[2]);
  h.dim[4] = static_cast<std::int16_t>(has_components ? v.ncomp : 1);
  for (int i = 5; i < 8; ++i) h.dim[i] = 1;
  h.datatype = datatype;
  h.bitpix = static_cast<std::int16_t>(bits);
  h.pixdim[0] = 1.0f;
  for (int i = 0; i < 3; ++i) h.pixdim[i + 1] = static_cast<float>(v.spacing[i]);
  h.pixdim[4] = 1.0f;
  h.srow_x[0] = h.pixdim[1];
  h.srow_y[1] = h.pixdim[2];
  h.srow_z[2] = h.pixdim[3];
  std::string d = "dfa:" + v.tag.str();
  std::strncpy(h.descrip, d.c_str(), sizeof(h.descrip) - 1);
  return h;
}

// NIfTI stores x fastest then y, z, t; in memory components are fastest.
template <class T>
void write_impl(const std::string& path, const Volume<T>& v, std::int16_t datatype) {
  Nifti1Header h = make_header(v, datatype, sizeof(T) * 8);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(&h), sizeof(h));
  const char pad[4] = {};
  out.write(pad, 4);

  const int nx = v.dims[0], ny = v.dims[1], nz = v.dims[2];
  std::vector<T> slab(static_cast<std::size_t>(nx) * ny * nz);
  for (int c = 0; c < v.ncomp; ++c) {
    std::size_t n = 0;
    for (int k = 0; k < nz; ++k)
      for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) slab[n++] = v.at(i, j, k)[c];
    out.write(reinterpret_cast<const char*>(slab.data()), slab.size() * sizeof(T));
  }
  if (!out) throw io_error("short write to '" + path + "'");
}

}  // namespace

void write(const std::string& path, const FloatVolume& v) { write_impl(path, v, kDtFloat32); }
void write(const std::string& path, const MaskVolume& v) { write_impl(path, v, kDtUint8); }

AnyVolume read(const std::string& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw io_error("cannot open '" + path + "'");
  const std::int64_t file_size = in.tellg();
  in.seekg(0);

  Nifti1Header h;
  if (file_size < static_cast<std::int64_t>(sizeof(h)))
    throw io_error("'" + path + "': file too small for a NIfTI-1 header (" +
                   std::to_string(file_size) + " bytes, need 348; at byte offset 0)");
  in.read(reinterpret_cast<char*>(&h), sizeof(h));

  if (h.sizeof_hdr != 348) {
    if (h.sizeof_hdr == 1543569408)  // 348 byte-swapped
      throw io_error("'" + path + "': big-endian NIfTI is not supported (at byte offset 0)");
    throw io_error("'" + path + "': bad sizeof_hdr " + std::to_string(h.sizeof_hdr) +
                   " (at byte offset 0)");
  }
  if (std::strncmp(h.magic, "n+1", 3) != 0)
    throw io_error("'" + path + "': bad magic (at byte offset 344); " +
                   "only single-file .nii is supported");
  if (h.dim[0] < 3 || h.dim[0] > 4)
    throw io_error("'" + path + "': unsupported dimensionality " + std::to_string(h.dim[0]));
  if (h.datatype != kDtFloat32 && h.datatype != kDtUint8)
    throw io_error("'" + path + "': unsupported datatype " + std::to_string(h.datatype) +
                   " (only float32 and uint8)");
  if (h.scl_slope != 0.0f && (h.scl_slope != 1.0f || h.scl_inter != 0.0f))
    throw io_error("'" + path + "': scaled payloads are not supported");

  std::array<int, 3> dims{h.dim[1], h.dim[2], h.dim[3]};
  int ncomp = h.dim[0] == 4 ? h.dim[4] : 1;
  if (dims[0] <= 0 || dims[1] <= 0 || dims[2] <= 0 || ncomp <= 0)
    throw io_error("'" + path + "': non-positive dimensions");

  std::string desc(h.descrip, strnlen(h.descrip, sizeof(h.descrip)));
  VolumeTag tag;
  if (desc.rfind("dfa:", 0) == 0) {
    tag = VolumeTag::parse(desc.substr(4));
    if (tag.component_count() != ncomp)
      throw io_error("'" + path + "': tag '" + tag.str() + "' expects " +
                     std::to_string(tag.component_count()) + " components, file has " +
                     std::to_string(ncomp));
  } else {
    // untagged foreign volume: infer what we can
    if (ncomp == 1) tag = {h.datatype == kDtUint8 ? VolumeKind::mask : VolumeKind::scalar, 0};
    else if (ncomp == 6) tag = {VolumeKind::tensor6, 0};
    else if (ncomp == 9) tag = {VolumeKind::frame9, 0};
    else if (int L = sh::order_for_count(ncomp); L > 0) tag = {VolumeKind::sh, L};
    else if (ncomp % 4 == 0) tag = {VolumeKind::peaks, ncomp / 4};
    else throw io_error("'" + path + "': cannot infer semantics for " +
                        std::to_string(ncomp) + " components (no dfa tag)");
  }

  const int bytes_per = h.datatype == kDtFloat32 ? 4 : 1;
  const std::int64_t nvox = std::int64_t{dims[0]} * dims[1] * dims[2] * ncomp;
  const std::int64_t offset = static_cast<std::int64_t>(h.vox_offset);
  if (offset < 348) throw io_error("'" + path + "': vox_offset below header size");
  const std::int64_t expected = offset + nvox * bytes_per;
  if (file_size < expected)
    throw io_error("'" + path + "': truncated file, expected " + std::to_string(expected) +
                   " bytes but found " + std::to_string(file_size) + " (at byte offset " +
                   std::to_string(file_size) + ")");
  in.seekg(offset);

  auto load = [&]<class T>(Volume<T>& v) {
    v.allocate(dims, ncomp, tag,
               {h.pixdim[1] > 0 ? h.pixdim[1] : 1.0, h.pixdim[2] > 0 ? h.pixdim[2] : 1.0,
                h.pixdim[3] > 0 ? h.pixdim[3] : 1.0});
    const int nx = dims[0], ny = dims[1], nz = dims[2];
    std::vector<T> slab(static_cast<std::size_t>(nx) * ny * nz);
    for (int c = 0; c < ncomp; ++c) {
      in.read(reinterpret_cast<char*>(slab.data()), slab.size() * sizeof(T));
      if (!in) throw io_error("'" + path + "': read failure in payload");
      std::size_t n = 0;
      for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
          for (int i = 0; i < nx; ++i) v.at(i, j, k)[c] = slab[n++];
    }
  };

  if (h.datatype == kDtUint8) {
    MaskVolume v;
    load(v);
    return v;
  }
  FloatVolume v;
  load(v);
  return v;
}

FloatVolume read_float(const std::string& path) {
  AnyVolume v = read(path);
  if (!std::holds_alternative<FloatVolume>(v))
    throw io_error("'" + path + "': expected a float32 volume");
  return std::get<FloatVolume>(std::move(v));
}

MaskVolume read_mask(const std::string& path) {
  AnyVolume v = read(path);
  if (!std::holds_alternative<MaskVolume>(v))
    throw io_error("'" + path + "': expected a uint8 mask volume");
  return std::get<MaskVolume>(std::move(v));
}

}  // namespace dfa::nifti
