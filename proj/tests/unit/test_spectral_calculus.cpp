#include "heatcoeff/spectral_calculus.hpp"
#include "heatcoeff/universal_functions.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace heatcoeff;

namespace {
Mat diag(std::initializer_list<double> v) {
  RVec d(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (double x : v) d(i++) = x;
  return d.cast<cplx>().asDiagonal();
}
}  // namespace

TEST_CASE("clusters merge eigenvalues within the tolerance") {
  const SpectralDecomposition dec = spectral_decompose(diag({1.0, 1.0 + 1e-12, 2.0}));
  REQUIRE(dec.clusters() == 2);
  CHECK(dec.count[0] == 2);
  CHECK(dec.count[1] == 1);
  CHECK(dec.values[0] == doctest::Approx(1.0).epsilon(1e-11));
  CHECK(dec.values[1] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(spectral_decompose(diag({1.0, 1.0 + 1e-6, 2.0})).clusters() == 3);
  CHECK(spectral_decompose(diag({1.0, 1.0 + 1e-6, 2.0}), 1e-4).clusters() == 2);
}

TEST_CASE("projectors resolve the identity and reconstruct u") {
  Rng rng(3);
  const Mat u = random_positive(5, rng);
  const SpectralDecomposition dec = spectral_decompose(u);
  Mat sum = Mat::Zero(5, 5), weighted = Mat::Zero(5, 5);
  for (int i = 0; i < dec.clusters(); ++i) {
    const Mat E = dec.projector(i);
    CHECK(max_abs(E * E - E) < 1e-12);
    sum += E;
    weighted += dec.values[i] * E;
  }
  CHECK(max_abs(sum - identity(5)) < 1e-12);
  CHECK(rel_diff(weighted, u) < 1e-12);
  CHECK(rel_diff(dec.reconstruct(), u) < 1e-12);
  CHECK(rel_diff(dec.apply([](double r) { return 1.0 / r; }), u.inverse()) < 1e-12);
}

TEST_CASE("input validation") {
  Mat bad(2, 2);
  bad << 1.0, 0.5, 0.0, 1.0;
  CHECK_THROWS_AS(spectral_decompose(bad), ValidationError);
  CHECK_THROWS_AS(spectral_decompose(diag({1.0, -1.0})), DomainError);
  CHECK_THROWS_AS(spectral_decompose(Mat(2, 3)), ValidationError);
}

TEST_CASE("sandwich with I_{1,1} on diag(1, 4)") {
  const SpectralDecomposition dec = spectral_decompose(diag({1.0, 4.0}));
  Mat b(2, 2);
  b << 0.0, 1.0, 1.0, 0.0;
  const Mat s = sandwich_sum([](std::span<const double> r) { return i_one_one(r[0], r[1]); }, dec, {b});
  CHECK(std::abs(s(0, 1) - std::log(4.0) / 3.0) < 1e-15);
  CHECK(std::abs(s(1, 0) - std::log(4.0) / 3.0) < 1e-15);
  CHECK(std::abs(s(0, 0)) < 1e-15);
}

TEST_CASE("sandwich of a product function factorises") {
  Rng rng(8);
  const Mat u = random_positive(4, rng);
  const Mat b1 = random_matrix(4, rng), b2 = random_matrix(4, rng);
  const SpectralDecomposition dec = spectral_decompose(u);
  // f(r0, r1, r2) = r0 r1^{-1} r2^2 gives u b1 u^{-1} b2 u^2
  const Mat s = sandwich_sum([](std::span<const double> r) { return r[0] / r[1] * r[2] * r[2]; }, dec, {b1, b2});
  CHECK(rel_diff(s, u * b1 * u.inverse() * b2 * u * u) < 1e-12);
  const SpectralTable t =
      tabulate([](std::span<const double> r) { return r[0] / r[1] * r[2] * r[2]; }, 2, dec);
  const std::vector<Mat> bs{b1, b2};
  CHECK(rel_diff(apply(t, dec, bs), s) < 1e-13);
}

TEST_CASE("sandwich over a degenerate spectrum") {
  Rng rng(9);
  Mat u = diag({1.0, 1.0, 3.0});
  const Mat b = random_matrix(3, rng);
  const SpectralDecomposition dec = spectral_decompose(u);
  REQUIRE(dec.clusters() == 2);
  const Mat s = sandwich_sum([](std::span<const double> r) { return i_eval(2.0, r); }, dec, {b});
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const double ri = u(i, i).real(), rj = u(j, j).real();
      CHECK(std::abs(s(i, j) - i_eval(2.0, {ri, rj}) * b(i, j)) < 1e-14);
    }
}

TEST_CASE("Gaussian moments of the flat metric") {
  const GaussianMoments gm = gaussian_moments(RMat::Identity(2, 2), 2);
  CHECK(gm.g_d == doctest::Approx(1.0 / (4.0 * std::numbers::pi)).epsilon(1e-15));
  const std::vector<int> i11{0, 0}, i12{0, 1}, i1111{0, 0, 0, 0}, i1122{0, 0, 1, 1};
  CHECK(gm.component(i11) == doctest::Approx(0.5));
  CHECK(gm.component(i12) == 0.0);
  CHECK(gm.component(i1111) == doctest::Approx(0.75));
  CHECK(gm.component(i1122) == doctest::Approx(0.25));
  const GaussianMoments g4 = gaussian_moments(RMat::Identity(4, 4), 1);
  CHECK(g4.g_d == doctest::Approx(1.0 / (16.0 * std::numbers::pi * std::numbers::pi)).epsilon(1e-14));
}

TEST_CASE("Gaussian moments scale with the metric") {
  RMat gi(2, 2);
  gi << 2.0, 0.3, 0.3, 1.0;
  const GaussianMoments gm = gaussian_moments(gi, 1);
  const RMat glo = gi.inverse();
  CHECK(gm.g_d == doctest::Approx(std::sqrt(glo.determinant()) / (4.0 * std::numbers::pi)).epsilon(1e-14));
  const std::vector<int> i12{0, 1};
  CHECK(gm.component(i12) == doctest::Approx(0.5 * glo(0, 1)).epsilon(1e-14));
  RMat neg = -RMat::Identity(2, 2);
  CHECK_THROWS_AS(gaussian_moments(neg, 1), DomainError);
}

TEST_CASE("t_kp with k = 0 is g_d G B_0 u^{-d/2-p}") {
  Rng rng(2);
  const Mat u = random_positive(3, rng);
  const Mat b = random_matrix(3, rng);
  const SpectralDecomposition dec = spectral_decompose(u);
  const GaussianMoments gm = gaussian_moments(RMat::Identity(2, 2), 1);
  const Mat t = t_kp_apply(0, 1, dec, gm, [&](std::span<const int>) { return std::vector<Mat>{b}; });
  // sum over (mu, nu) of G_{mu nu} = 1/2 + 1/2
  const Mat ref = gm.g_d * 1.0 * b * dec.apply([](double r) { return std::pow(r, -2.0); });
  CHECK(rel_diff(t, ref) < 1e-12);
}
