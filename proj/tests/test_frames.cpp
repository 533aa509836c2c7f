#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "dfa/frames.hpp"
#include "dfa/synth.hpp"
#include "test_util.hpp"

using namespace dfa;
using namespace dfa::test;

namespace {

PeakField single_direction_field(std::array<int, 3> dims, const Vec3& axis, double w = 1.0) {
  PeakField f;
  f.allocate(dims, 1);
  WeightedDirector d{normalized(axis), w};
  for (int k = 0; k < dims[2]; ++k)
    for (int j = 0; j < dims[1]; ++j)
      for (int i = 0; i < dims[0]; ++i)
        f.set_peaks(i, j, k, std::span<const WeightedDirector>{&d, 1});
  return f;
}

}  // namespace

TEST_CASE("projected tensor vanishes when all neighbors are parallel") {
  PeakField f = single_direction_field({3, 3, 3}, {0, 0, 1});
  Mat3 q = projected_orientational_tensor(f, 1, 1, 1);
  CHECK(frobenius_norm(q) < 1e-14);
  LocalFrame lf = local_frame(f, 1, 1, 1);
  CHECK(lf.state == FrameState::partial);
  CHECK(norm(lf.u2) == 0.0);
  CHECK(norm(lf.u3) == 0.0);
}

TEST_CASE("single 45-degree neighbor produces the textbook projection") {
  PeakField f;
  f.allocate({3, 3, 3}, 1);
  WeightedDirector center{{0, 0, 1}, 1.0};
  f.set_peaks(1, 1, 1, std::span<const WeightedDirector>{&center, 1});
  double s = std::sqrt(0.5);
  WeightedDirector diag{{s, 0, s}, 2.0};  // 45 degrees from z in the xz plane
  f.set_peaks(2, 1, 1, std::span<const WeightedDirector>{&diag, 1});

  Mat3 q = projected_orientational_tensor(f, 1, 1, 1);
  // projection of the neighbor is (s, 0, 0); weight exp(-1/2) * 2 * s^2
  double expected = std::exp(-0.5) * 2.0 * 0.5;
  CHECK(q(0, 0) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(std::fabs(q(1, 1)) < 1e-15);
  CHECK(std::fabs(q(2, 2)) < 1e-15);
}

TEST_CASE("projected tensor annihilates the principal axis on random fields") {
  auto g = rng(91);
  for (int t = 0; t < 20; ++t) {
    PeakField f;
    f.allocate({4, 4, 4}, 2);
    std::uniform_real_distribution<double> ud(0.2, 1.0);
    for (int k = 0; k < 4; ++k)
      for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 4; ++i) {
          std::vector<WeightedDirector> ps;
          int n = 1 + (g() % 2);
          for (int p = 0; p < n; ++p) ps.push_back({random_unit_vector(g), ud(g)});
          f.set_peaks(i, j, k, ps);
        }
    Vec3 u1 = f.peaks_at(2, 2, 2).front().axis;
    Mat3 q = projected_orientational_tensor(f, 2, 2, 2);
    CHECK(norm(q * u1) < 1e-10 * std::max(1.0, frobenius_norm(q)));
    // frame orthogonality whenever full
    LocalFrame lf = local_frame(f, 2, 2, 2);
    if (lf.state == FrameState::full) {
      CHECK(std::fabs(dot(lf.u1, lf.u2)) < 1e-8);
      CHECK(std::fabs(dot(lf.u1, lf.u3)) < 1e-8);
      CHECK(std::fabs(dot(lf.u2, lf.u3)) < 1e-8);
      CHECK(director_distance(lf.u3, cross(lf.u1, lf.u2)) < 1e-8);
    }
  }
}

TEST_CASE("local_frame requires a peak") {
  PeakField f;
  f.allocate({3, 3, 3}, 1);
  CHECK_THROWS_AS(local_frame(f, 1, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(projected_orientational_tensor(f, 1, 1, 1), std::invalid_argument);
}

TEST_CASE("frame_field marks voxels without peaks absent") {
  PeakField f;
  f.allocate({3, 3, 3}, 1);
  WeightedDirector d{{0, 0, 1}, 1.0};
  f.set_peaks(1, 1, 1, std::span<const WeightedDirector>{&d, 1});
  FrameField ff = frame_field(f);
  for (int k = 0; k < 3; ++k)
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 3; ++i) {
        if (i == 1 && j == 1 && k == 1)
          CHECK(ff.at(i, j, k).state != FrameState::absent);
        else
          CHECK(ff.at(i, j, k).state == FrameState::absent);
      }

  PeakField empty;
  empty.allocate({3, 3, 3}, 1);
  FrameField fe = frame_field(empty);
  for (const LocalFrame& lf : fe.frames) CHECK(lf.state == FrameState::absent);

  // constant-direction field: u1 everywhere, no in-plane change anywhere
  FrameField fc = frame_field(single_direction_field({4, 4, 4}, {1, 2, 2}));
  for (const LocalFrame& lf : fc.frames) {
    CHECK(lf.state == FrameState::partial);
    CHECK(director_distance(lf.u1, normalized(Vec3{1, 2, 2})) < 1e-12);
  }
}

TEST_CASE("splay construction: u2 follows the in-plane fanning direction") {
  synth::SyntheticSpec spec;
  spec.kind = synth::FieldKind::splay;
  spec.dims = {16, 8, 3};
  spec.angle_range = 1.2;
  PeakField peaks = synth::ground_truth_peaks(spec);
  FrameField ff = frame_field(peaks);
  // interior voxels: u1 in the xy plane, u2 the in-plane normal, u3 = z
  for (int j = 2; j < 6; ++j)
    for (int i = 2; i < 14; ++i) {
      const LocalFrame& lf = ff.at(i, j, 1);
      REQUIRE(lf.state == FrameState::full);
      Vec3 expected_u2 = cross(Vec3{0, 0, 1}, lf.u1);
      CHECK(director_distance(lf.u2, normalized(expected_u2)) < 1e-8);
      CHECK(director_distance(lf.u3, {0, 0, 1}) < 1e-8);
    }
}

TEST_CASE("frames are invariant under stored sign flips") {
  auto g = rng(92);
  PeakField f;
  f.allocate({3, 3, 3}, 1);
  for (int k = 0; k < 3; ++k)
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 3; ++i) {
        WeightedDirector d{random_unit_vector(g), 0.5 + 0.5 * std::generate_canonical<double, 53>(g)};
        f.set_peaks(i, j, k, std::span<const WeightedDirector>{&d, 1});
      }
  PeakField flipped = f;
  for (std::size_t s = 0; s < flipped.slots.size(); s += 2)
    flipped.slots[s].axis = -flipped.slots[s].axis;

  FrameField a = frame_field(f);
  FrameField b = frame_field(flipped);
  for (std::size_t v = 0; v < a.voxel_count(); ++v) {
    CHECK(a.frames[v].state == b.frames[v].state);
    if (a.frames[v].state == FrameState::full) {
      CHECK(director_distance(a.frames[v].u1, b.frames[v].u1) == 0.0);
      CHECK(director_distance(a.frames[v].u2, b.frames[v].u2) == 0.0);
      CHECK(director_distance(a.frames[v].u3, b.frames[v].u3) == 0.0);
    }
  }
}

TEST_CASE("frame_field commutes with global rotations") {
  auto g = rng(93);
  synth::SyntheticSpec spec;
  spec.kind = synth::FieldKind::bend;
  spec.dims = {12, 8, 3};
  spec.angle_range = 1.0;
  PeakField peaks = synth::ground_truth_peaks(spec);

  Mat3 G = random_rotation(g);
  PeakField rotated = peaks;
  for (auto& s : rotated.slots) s.axis = G * s.axis;

  FrameField a = frame_field(peaks);
  FrameField b = frame_field(rotated);
  double tol = 0.5 * std::numbers::pi / 180.0;
  for (std::size_t v = 0; v < a.voxel_count(); ++v) {
    REQUIRE(a.frames[v].state == b.frames[v].state);
    if (a.frames[v].state != FrameState::full) continue;
    CHECK(angle_between_directors(G * a.frames[v].u1, b.frames[v].u1) < tol);
    CHECK(angle_between_directors(G * a.frames[v].u2, b.frames[v].u2) < tol);
    CHECK(angle_between_directors(G * a.frames[v].u3, b.frames[v].u3) < tol);
  }
}

TEST_CASE("vector mode builds frames from signed projections") {
  // one-sided lean: a symmetric fan would cancel the signed mean (which is
  // why the director path uses second moments instead)
  PeakField f;
  f.allocate({3, 3, 3}, 1);
  for (int k = 0; k < 3; ++k)
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 3; ++i) {
        double lean = 0.25 * std::max(i - 1, 0);
        WeightedDirector d{normalized(Vec3{std::sin(lean), 0, std::cos(lean)}), 1.0};
        f.set_peaks(i, j, k, std::span<const WeightedDirector>{&d, 1});
      }
  FrameOptions opts;
  opts.vector_mode = true;
  LocalFrame lf = local_frame(f, 1, 1, 1, opts);
  REQUIRE(lf.state == FrameState::full);
  CHECK(director_distance(lf.u2, {1, 0, 0}) < 1e-10);

  opts.vector_mode_max = true;
  LocalFrame lm = local_frame(f, 1, 1, 1, opts);
  REQUIRE(lm.state == FrameState::full);
  CHECK(director_distance(lm.u2, {1, 0, 0}) < 1e-10);

  // a symmetric fan degrades the signed mean to a partial frame
  PeakField sym;
  sym.allocate({3, 3, 3}, 1);
  for (int k = 0; k < 3; ++k)
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 3; ++i) {
        double lean = 0.25 * (i - 1);
        WeightedDirector d{normalized(Vec3{std::sin(lean), 0, std::cos(lean)}), 1.0};
        sym.set_peaks(i, j, k, std::span<const WeightedDirector>{&d, 1});
      }
  FrameOptions mean_opts;
  mean_opts.vector_mode = true;
  CHECK(local_frame(sym, 1, 1, 1, mean_opts).state == FrameState::partial);
}

TEST_CASE("custom spatial weight callback replaces the Gaussian") {
  PeakField f;
  f.allocate({3, 3, 3}, 1);
  WeightedDirector up{{0, 0, 1}, 1.0};
  for (int k = 0; k < 3; ++k)
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 3; ++i) f.set_peaks(i, j, k, std::span<const WeightedDirector>{&up, 1});
  // two tilted neighbors pulling in different directions, y dominant
  double s = std::sqrt(0.5);
  WeightedDirector tilt_x{{s, 0, s}, 1.0};
  WeightedDirector tilt_y{{0, s, s}, 2.0};
  f.set_peaks(2, 1, 1, std::span<const WeightedDirector>{&tilt_x, 1});
  f.set_peaks(0, 1, 1, std::span<const WeightedDirector>{&tilt_y, 1});

  // a weight that only admits the +x neighbor makes u2 the x axis
  FrameOptions opts;
  opts.spatial_weight = [](const Vec3& off) {
    return (off.x == 1.0 && off.y == 0.0 && off.z == 0.0) ? 1.0 : 0.0;
  };
  LocalFrame lf = local_frame(f, 1, 1, 1, opts);
  REQUIRE(lf.state == FrameState::full);
  CHECK(director_distance(lf.u2, {1, 0, 0}) < 1e-12);

  // default isotropic weighting is dominated by the heavier y neighbor
  LocalFrame iso = local_frame(f, 1, 1, 1);
  REQUIRE(iso.state == FrameState::full);
  CHECK(director_distance(iso.u2, {0, 1, 0}) < 1e-12);
}

TEST_CASE("frame volume round trip preserves states and axes") {
  synth::SyntheticSpec spec;
  spec.kind = synth::FieldKind::twist;
  spec.dims = {8, 6, 3};
  PeakField peaks = synth::ground_truth_peaks(spec);
  FrameField ff = frame_field(peaks);

  FloatVolume vol = frames_to_volume(ff);
  MaskVolume mask = frames_validity_mask(ff);
  FrameField back = frames_from_volume(vol);
  for (std::size_t v = 0; v < ff.voxel_count(); ++v) {
    CHECK(ff.frames[v].state == back.frames[v].state);
    if (ff.frames[v].state == FrameState::absent) {
      CHECK(mask.data[v] == 0);
      continue;
    }
    CHECK(mask.data[v] == 1);
    CHECK(director_distance(ff.frames[v].u1, back.frames[v].u1) < 1e-6);
  }
}
