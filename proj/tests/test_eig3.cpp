#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Eigenvalues>

#include "dfa/eig3.hpp"
#include "test_util.hpp"

using namespace dfa;
using namespace dfa::test;

namespace {

// Householder QL reference (Eigen) as the independent oracle.
void reference_eigen(const Mat3& a, std::array<double, 3>& values) {
  Eigen::Matrix3d m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = a(i, j);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> s(m);
  values = {s.eigenvalues()(2), s.eigenvalues()(1), s.eigenvalues()(0)};
}

Mat3 random_symmetric(std::mt19937_64& g, double scale) {
  std::normal_distribution<double> nd(0.0, scale);
  Mat3 a;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) a(i, j) = a(j, i) = nd(g);
  return a;
}

}  // namespace

TEST_CASE("analytic eigenvalues match the QL reference") {
  auto g = rng(71);
  for (int t = 0; t < 2000; ++t) {
    double scale = std::pow(10.0, -6 + (t % 13));
    Mat3 a = random_symmetric(g, scale);
    SymmetricEigen3 e = eigen_symmetric(a);
    std::array<double, 3> ref;
    reference_eigen(a, ref);
    double m = std::max({std::fabs(ref[0]), std::fabs(ref[2]), 1e-300});
    for (int i = 0; i < 3; ++i) CHECK(std::fabs(e.values[i] - ref[i]) < 1e-12 * m);
  }
}

TEST_CASE("eigenvectors satisfy the defining equation and orthonormality") {
  auto g = rng(72);
  for (int t = 0; t < 500; ++t) {
    Mat3 a = random_symmetric(g, 1.0);
    SymmetricEigen3 e = eigen_symmetric(a);
    double m = std::max({std::fabs(e.values[0]), std::fabs(e.values[2]), 1e-300});
    for (int i = 0; i < 3; ++i) {
      CHECK(norm(a * e.vectors[i] - e.values[i] * e.vectors[i]) < 1e-9 * m);
      CHECK(std::fabs(norm(e.vectors[i]) - 1.0) < 1e-12);
    }
    CHECK(std::fabs(dot(e.vectors[0], e.vectors[1])) < 1e-9);
    CHECK(std::fabs(dot(e.vectors[0], e.vectors[2])) < 1e-9);
    CHECK(std::fabs(dot(e.vectors[1], e.vectors[2])) < 1e-9);
  }
}

TEST_CASE("diagonal, degenerate, and zero matrices") {
  SymmetricEigen3 d = eigen_symmetric(Mat3::diagonal(3, -1, 2));
  CHECK(d.values[0] == doctest::Approx(3.0));
  CHECK(d.values[1] == doctest::Approx(2.0));
  CHECK(d.values[2] == doctest::Approx(-1.0));
  CHECK(std::fabs(std::fabs(d.vectors[0].x) - 1.0) < 1e-14);

  SymmetricEigen3 z = eigen_symmetric(Mat3::zero());
  CHECK(z.degenerate);
  CHECK(z.values[0] == 0.0);

  // prolate: repeated small eigenvalue
  auto g = rng(73);
  Mat3 R = random_rotation(g);
  Mat3 a = R * Mat3::diagonal(2.0, 0.5, 0.5) * transpose(R);
  SymmetricEigen3 e = eigen_symmetric(a);
  CHECK(e.degenerate);
  CHECK(e.values[0] == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(director_distance(e.vectors[0], R.col(0)) < 1e-7);
}

TEST_CASE("rank-1 dyadic input recovers the axis") {
  auto g = rng(74);
  for (int t = 0; t < 100; ++t) {
    Vec3 v = random_unit_vector(g);
    Mat3 a = outer(v, v) * 0.7;
    SymmetricEigen3 e = eigen_symmetric(a);
    CHECK(e.values[0] == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(director_distance(e.vectors[0], v) < 1e-9);
  }
}
