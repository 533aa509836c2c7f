// Command-line front end for the director-field analysis pipeline:
// synthetic fields, ODF peak extraction, orientational order maps, local
// frames, and distortion indices over NIfTI volumes.

#include <cstdio>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dfa/distortion.hpp"
#include "dfa/errors.hpp"
#include "dfa/frames.hpp"
#include "dfa/nifti.hpp"
#include "dfa/order.hpp"
#include "dfa/parallel.hpp"
#include "dfa/peaks.hpp"
#include "dfa/synth.hpp"
#include "dfa/tfa.hpp"

namespace {

using dfa::FloatVolume;

double parse_angle(const std::string& s) {
  if (s == "pi") return std::numbers::pi;
  if (s == "pi/2") return std::numbers::pi / 2;
  if (s == "pi/4") return std::numbers::pi / 4;
  if (s == "2pi") return 2 * std::numbers::pi;
  return std::stod(s);
}

template <class T, std::size_t N>
std::array<T, N> parse_tuple(const std::string& s, const char* what) {
  std::array<T, N> out{};
  std::size_t pos = 0, idx = 0;
  while (idx < N) {
    std::size_t comma = s.find(',', pos);
    std::string tok = s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (tok.empty())
      throw dfa::usage_error(std::string(what) + ": expected " + std::to_string(N) +
                             " comma-separated values");
    out[idx++] = static_cast<T>(std::stod(tok));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (idx != N)
    throw dfa::usage_error(std::string(what) + ": expected " + std::to_string(N) +
                           " comma-separated values");
  return out;
}

// --config <file.json>: a flat object mirroring long option names; values
// apply wherever the command line leaves an option unset.
std::vector<std::string> apply_config(std::vector<std::string> args) {
  std::string config_path;
  for (std::size_t i = 0; i + 1 < args.size(); ++i)
    if (args[i] == "--config") config_path = args[i + 1];
  if (config_path.empty()) return args;

  std::ifstream in(config_path);
  if (!in) throw dfa::io_error("cannot open config file '" + config_path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw dfa::usage_error("config file '" + config_path + "': " + e.what());
  }
  if (!j.is_object()) throw dfa::usage_error("config file must hold a JSON object");

  for (auto it = j.begin(); it != j.end(); ++it) {
    std::string flag = "--" + it.key();
    bool present = false;
    for (const std::string& a : args)
      if (a == flag || a.rfind(flag + "=", 0) == 0) present = true;
    if (present) continue;
    if (it.value().is_boolean()) {
      if (it.value().get<bool>()) args.push_back(flag);
    } else if (it.value().is_string()) {
      args.push_back(flag);
      args.push_back(it.value().get<std::string>());
    } else {
      args.push_back(flag);
      args.push_back(it.value().dump());
    }
  }
  return args;
}

FloatVolume load_tagged(const std::string& path, dfa::VolumeKind kind, const char* context) {
  FloatVolume vol = dfa::nifti::read_float(path);
  dfa::expect_tag(vol.tag, kind, context);
  return vol;
}

FloatVolume odf_from_inputs(const std::string& odf_path, const std::string& tensor_path,
                            int sh_order, const char* context) {
  if (!odf_path.empty() && !tensor_path.empty())
    throw dfa::usage_error(std::string(context) + ": give either --in or --tensor, not both");
  if (!odf_path.empty()) return load_tagged(odf_path, dfa::VolumeKind::sh, context);
  if (!tensor_path.empty()) {
    FloatVolume tensors = load_tagged(tensor_path, dfa::VolumeKind::tensor6, context);
    return dfa::synth::odf_sh_volume(tensors, sh_order);
  }
  throw dfa::usage_error(std::string(context) + ": an --in or --tensor volume is required");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Director field analysis for ODF and tensor volumes"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON file with default option values");

  // ---- synth ----------------------------------------------------------
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic tensor field");
  std::string synth_kind = "twist", synth_dims = "32,16,3", synth_angle = "pi";
  std::string synth_spacing = "1,1,1", synth_eigen = "1.7e-3,0.2e-3,0.2e-3";
  std::string synth_out, synth_odf_out;
  double mode_bottom = 0.0, mode_top = 0.0;
  int synth_sh_order = 8;
  synth_cmd->add_option("--kind", synth_kind, "splay|bend|twist|circle-bend|circle-splay|helical");
  synth_cmd->add_option("--dims", synth_dims, "grid size nx,ny,nz");
  synth_cmd->add_option("--angle", synth_angle, "total rotation across x (radians, or pi)");
  synth_cmd->add_option("--spacing", synth_spacing, "voxel spacing mm");
  synth_cmd->add_option("--eigenvalues", synth_eigen, "tensor eigenvalues mm^2/s, descending");
  synth_cmd->add_option("--mode-bottom", mode_bottom, "tensor-mode blend at the bottom row");
  synth_cmd->add_option("--mode-top", mode_top, "tensor-mode blend at the top row");
  synth_cmd->add_option("--out", synth_out, "output tensor6 volume")->required();
  synth_cmd->add_option("--odf-out", synth_odf_out, "also write the SH ODF volume");
  synth_cmd->add_option("--sh-order", synth_sh_order, "SH order for --odf-out");

  // ---- peaks ----------------------------------------------------------
  auto* peaks_cmd = app.add_subcommand("peaks", "Detect ODF peaks over an SH volume");
  std::string peaks_in, peaks_out;
  double gfa_thresh = 0.3, peak_ratio = 0.5;
  int max_peaks = 3;
  peaks_cmd->add_option("--in", peaks_in, "input sh:L volume")->required();
  peaks_cmd->add_option("--gfa-thresh", gfa_thresh, "GFA threshold for peak detection");
  peaks_cmd->add_option("--peak-ratio", peak_ratio, "discard peaks below ratio * max value");
  peaks_cmd->add_option("--max-peaks", max_peaks, "peak slots per voxel");
  peaks_cmd->add_option("--out", peaks_out, "output peaks:K volume")->required();

  // ---- oo-od ----------------------------------------------------------
  auto* oo_cmd = app.add_subcommand("oo-od", "Orientational order/dispersion maps");
  std::string oo_in, oo_tensor, out_oo, out_od, out_mask;
  double oo_gfa = 0.3;
  int oo_sh_order = 8;
  oo_cmd->add_option("--in", oo_in, "input sh:L volume");
  oo_cmd->add_option("--tensor", oo_tensor, "input tensor6 volume (converted internally)");
  oo_cmd->add_option("--sh-order", oo_sh_order, "SH order for --tensor conversion");
  oo_cmd->add_option("--gfa-thresh", oo_gfa, "GFA threshold (0 computes everywhere)");
  oo_cmd->add_option("--out-oo", out_oo, "output OO map")->required();
  oo_cmd->add_option("--out-od", out_od, "output OD map")->required();
  oo_cmd->add_option("--out-mask", out_mask, "output validity mask");

  // ---- frames ---------------------------------------------------------
  auto* frames_cmd = app.add_subcommand("frames", "Local orthogonal frames from a peak field");
  std::string frames_peaks, frames_out, frames_mask_out;
  double sigma = 1.0;
  int radius = 1;
  bool vector_field = false;
  frames_cmd->add_option("--peaks", frames_peaks, "input peaks:K volume")->required();
  frames_cmd->add_option("--sigma", sigma, "Gaussian weight sigma, voxels");
  frames_cmd->add_option("--radius", radius, "cubic neighborhood radius, voxels");
  frames_cmd->add_flag("--vector-field", vector_field, "treat peaks as sign-resolved vectors");
  frames_cmd->add_option("--out", frames_out, "output frame9 volume")->required();
  frames_cmd->add_option("--out-mask", frames_mask_out, "output validity mask");

  // ---- distortion -----------------------------------------------------
  auto* dist_cmd = app.add_subcommand("distortion", "Splay/bend/twist/total index maps");
  std::string dist_frames, dist_tensor, out_prefix = "dist_";
  bool spacing_normalize = false;
  double dist_gfa = 0.3;
  int dist_sh_order = 8;
  dist_cmd->add_option("--frames", dist_frames, "input frame9 volume");
  dist_cmd->add_option("--tensor", dist_tensor,
                       "input tensor6 volume (full pipeline applied internally)");
  dist_cmd->add_option("--sh-order", dist_sh_order, "SH order for --tensor conversion");
  dist_cmd->add_option("--gfa-thresh", dist_gfa, "GFA threshold for --tensor conversion");
  dist_cmd->add_flag("--spacing-normalize", spacing_normalize,
                     "normalize rotation angles by voxel spacing (mm^-1 output)");
  dist_cmd->add_option("--out-prefix", out_prefix, "prefix for the five output volumes");

  // ---- tfa ------------------------------------------------------------
  auto* tfa_cmd = app.add_subcommand("tfa", "Tensor-field analysis maps");
  std::string tfa_in, tfa_op = "grad-norm", tfa_out;
  tfa_cmd->add_option("--in", tfa_in, "input tensor6 volume")->required();
  tfa_cmd->add_option("--op", tfa_op, "grad-norm|md-grad|structure4");
  tfa_cmd->add_option("--out", tfa_out, "output scalar volume")->required();

  for (CLI::App* sc : {synth_cmd, peaks_cmd, oo_cmd, frames_cmd, dist_cmd, tfa_cmd})
    sc->add_option("--config", config_path, "JSON file with default option values");

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    args = apply_config(args);
    std::vector<const char*> cargs;
    cargs.push_back(argv[0]);
    for (const std::string& a : args) cargs.push_back(a.c_str());
    app.parse(static_cast<int>(cargs.size()), const_cast<char**>(cargs.data()));
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const dfa::usage_error& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 1;
  } catch (const dfa::io_error& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return 2;
  }

  try {
    if (synth_cmd->parsed()) {
      dfa::synth::SyntheticSpec spec;
      spec.kind = dfa::synth::parse_kind(synth_kind);
      spec.dims = parse_tuple<int, 3>(synth_dims, "--dims");
      spec.spacing = parse_tuple<double, 3>(synth_spacing, "--spacing");
      spec.eigenvalues = parse_tuple<double, 3>(synth_eigen, "--eigenvalues");
      spec.angle_range = parse_angle(synth_angle);
      spec.mode_blend_bottom = mode_bottom;
      spec.mode_blend_top = mode_top;
      FloatVolume tensors = dfa::synth::generate_tensors(spec);
      dfa::nifti::write(synth_out, tensors);
      if (!synth_odf_out.empty())
        dfa::nifti::write(synth_odf_out, dfa::synth::odf_sh_volume(tensors, synth_sh_order));
    } else if (peaks_cmd->parsed()) {
      FloatVolume odf = load_tagged(peaks_in, dfa::VolumeKind::sh, "peaks");
      dfa::sh::PeakOptions opts;
      opts.gfa_threshold = gfa_thresh;
      opts.peak_ratio = peak_ratio;
      dfa::PeakField field = dfa::detect_peak_field(odf, opts, max_peaks);
      dfa::nifti::write(peaks_out, dfa::peaks_to_volume(field));
    } else if (oo_cmd->parsed()) {
      FloatVolume odf = odf_from_inputs(oo_in, oo_tensor, oo_sh_order, "oo-od");
      dfa::order::OOMaps maps = dfa::order::oo_od_maps(odf, oo_gfa);
      dfa::nifti::write(out_oo, maps.oo);
      dfa::nifti::write(out_od, maps.od);
      if (!out_mask.empty()) dfa::nifti::write(out_mask, maps.valid);
    } else if (frames_cmd->parsed()) {
      FloatVolume pv = load_tagged(frames_peaks, dfa::VolumeKind::peaks, "frames");
      dfa::PeakField field = dfa::peaks_from_volume(pv);
      dfa::FrameOptions opts;
      opts.sigma_voxels = sigma;
      opts.radius_voxels = radius;
      opts.vector_mode = vector_field;
      dfa::FrameField ff = dfa::frame_field(field, opts);
      dfa::nifti::write(frames_out, dfa::frames_to_volume(ff));
      if (!frames_mask_out.empty())
        dfa::nifti::write(frames_mask_out, dfa::frames_validity_mask(ff));
    } else if (dist_cmd->parsed()) {
      dfa::FrameField ff;
      if (!dist_frames.empty() && !dist_tensor.empty())
        throw dfa::usage_error("distortion: give either --frames or --tensor, not both");
      if (!dist_frames.empty()) {
        ff = dfa::frames_from_volume(
            load_tagged(dist_frames, dfa::VolumeKind::frame9, "distortion"));
      } else if (!dist_tensor.empty()) {
        FloatVolume odf = odf_from_inputs("", dist_tensor, dist_sh_order, "distortion");
        dfa::sh::PeakOptions popts;
        popts.gfa_threshold = dist_gfa;
        dfa::PeakField field = dfa::detect_peak_field(odf, popts, 3);
        ff = dfa::frame_field(field);
      } else {
        throw dfa::usage_error("distortion: a --frames or --tensor volume is required");
      }
      dfa::distortion::DerivativeOptions opts;
      opts.spacing_normalize = spacing_normalize;
      dfa::distortion::DistortionMaps maps = dfa::distortion::distortion_maps(ff, opts);
      dfa::nifti::write(out_prefix + "splay.nii", maps.splay);
      dfa::nifti::write(out_prefix + "bend.nii", maps.bend);
      dfa::nifti::write(out_prefix + "twist.nii", maps.twist);
      dfa::nifti::write(out_prefix + "total.nii", maps.total);
      dfa::nifti::write(out_prefix + "mask.nii", maps.flags);
    } else if (tfa_cmd->parsed()) {
      if (tfa_op != "grad-norm" && tfa_op != "md-grad" && tfa_op != "structure4")
        throw dfa::usage_error("tfa: unknown --op '" + tfa_op + "'");
      FloatVolume tensors = load_tagged(tfa_in, dfa::VolumeKind::tensor6, "tfa");
      FloatVolume out;
      out.allocate(tensors.dims, 1, {dfa::VolumeKind::scalar, 0}, tensors.spacing);
      const dfa::Mat3 third = dfa::Mat3::diagonal(1.0 / 3, 1.0 / 3, 1.0 / 3);
      dfa::parallel_for(static_cast<std::int64_t>(tensors.voxel_count()), [&](std::int64_t v) {
        int nx = tensors.dims[0], ny = tensors.dims[1];
        int i = static_cast<int>(v % nx);
        int j = static_cast<int>((v / nx) % ny);
        int k = static_cast<int>(v / (static_cast<std::int64_t>(nx) * ny));
        dfa::tfa::TensorGradient g = dfa::tfa::tensor_gradient(tensors, i, j, k);
        double value = 0.0;
        if (tfa_op == "grad-norm") {
          double s = 0;
          for (int c = 0; c < 3; ++c)
            for (int a = 0; a < 3; ++a)
              for (int b = 0; b < 3; ++b) s += g.g[c](a, b) * g.g[c](a, b);
          value = std::sqrt(s);
        } else if (tfa_op == "md-grad") {
          value = dfa::norm(dfa::tfa::project_gradient_to_vector(third, g));
        } else {
          dfa::tfa::StructureSpectrum spectrum =
              dfa::tfa::structure_tensor_spectrum(dfa::tfa::structure_tensor_4(g));
          value = std::abs(spectrum.eigenvalues[0]);
        }
        out.data[v] = static_cast<float>(value);
      });
      dfa::nifti::write(tfa_out, out);
    }
  } catch (const dfa::usage_error& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 1;
  } catch (const dfa::io_error& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 3;
  }
  return 0;
}
