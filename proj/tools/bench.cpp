// Timing harness comparing the OpenMP kernels against their serial
// reference implementations on a synthetic ODF volume, verifying that both
// produce identical output.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "dfa/distortion.hpp"
#include "dfa/frames.hpp"
#include "dfa/order.hpp"
#include "dfa/parallel.hpp"
#include "dfa/peaks.hpp"
#include "dfa/synth.hpp"

using namespace dfa;

namespace {

double seconds(std::chrono::steady_clock::time_point a, std::chrono::steady_clock::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

template <class F>
double timed(F&& f) {
  auto t0 = std::chrono::steady_clock::now();
  f();
  return seconds(t0, std::chrono::steady_clock::now());
}

void report(const char* name, double serial, double parallel, bool identical) {
  std::printf("%-18s %9.3f ms %9.3f ms  x%-5.2f %s\n", name, serial * 1e3, parallel * 1e3,
              parallel > 0 ? serial / parallel : 0.0, identical ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  int n = argc > 1 ? std::atoi(argv[1]) : 24;
  if (n < 4) n = 4;
  std::printf("volume %dx%dx%d, %d thread(s)\n", n, n, n, max_threads());

  synth::SyntheticSpec spec;
  spec.kind = synth::FieldKind::twist;
  spec.dims = {n, n, n};
  spec.angle_range = 1.4;
  FloatVolume tensors = synth::generate_tensors(spec);

  FloatVolume odf_serial, odf_parallel;
  double ts = timed([&] { odf_serial = synth::odf_sh_volume_serial(tensors, 8); });
  double tp = timed([&] { odf_parallel = synth::odf_sh_volume(tensors, 8); });
  report("sh fit", ts, tp, odf_serial.data == odf_parallel.data);

  sh::PeakOptions popts;
  PeakField peaks_serial, peaks_parallel;
  ts = timed([&] { peaks_serial = detect_peak_field_serial(odf_serial, popts, 3); });
  tp = timed([&] { peaks_parallel = detect_peak_field(odf_parallel, popts, 3); });
  bool peaks_same = peaks_serial.counts == peaks_parallel.counts;
  for (std::size_t i = 0; peaks_same && i < peaks_serial.slots.size(); ++i)
    peaks_same = peaks_serial.slots[i].axis == peaks_parallel.slots[i].axis &&
                 peaks_serial.slots[i].weight == peaks_parallel.slots[i].weight;
  report("peak detection", ts, tp, peaks_same);

  FrameField frames_serial, frames_parallel;
  ts = timed([&] { frames_serial = frame_field_serial(peaks_serial); });
  tp = timed([&] { frames_parallel = frame_field(peaks_parallel); });
  bool frames_same = frames_serial.frames.size() == frames_parallel.frames.size();
  for (std::size_t i = 0; frames_same && i < frames_serial.frames.size(); ++i)
    frames_same = frames_serial.frames[i].state == frames_parallel.frames[i].state &&
                  frames_serial.frames[i].u1 == frames_parallel.frames[i].u1 &&
                  frames_serial.frames[i].u2 == frames_parallel.frames[i].u2 &&
                  frames_serial.frames[i].u3 == frames_parallel.frames[i].u3;
  report("frames", ts, tp, frames_same);

  distortion::DistortionMaps dist_serial, dist_parallel;
  ts = timed([&] { dist_serial = distortion::distortion_maps_serial(frames_serial); });
  tp = timed([&] { dist_parallel = distortion::distortion_maps(frames_parallel); });
  report("distortion", ts, tp,
         dist_serial.splay.data == dist_parallel.splay.data &&
             dist_serial.bend.data == dist_parallel.bend.data &&
             dist_serial.twist.data == dist_parallel.twist.data &&
             dist_serial.total.data == dist_parallel.total.data);

  order::OOMaps oo_serial, oo_parallel;
  ts = timed([&] { oo_serial = order::oo_od_maps_serial(odf_serial, 0.3); });
  tp = timed([&] { oo_parallel = order::oo_od_maps(odf_parallel, 0.3); });
  report("oo/od maps", ts, tp,
         oo_serial.oo.data == oo_parallel.oo.data && oo_serial.od.data == oo_parallel.od.data);

  return 0;
}
