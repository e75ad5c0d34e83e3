#include "heatcoeff/modular.hpp"
#include "heatcoeff/universal_functions.hpp"

#include <Eigen/Eigenvalues>
#include <doctest.h>

#include <cmath>

using namespace heatcoeff;

namespace {
Mat hermitian_exp(const Mat& h, double s) {
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  const RVec e = (s * es.eigenvalues().array()).exp();
  return es.eigenvectors() * e.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}
}  // namespace

TEST_CASE("g1 values") {
  CHECK(modular_g1(4.0) == doctest::Approx(1.0 / std::log(4.0)).epsilon(1e-15));
  CHECK(modular_g1(1.0) == 0.5);
  for (double e : {1e-3, 1e-7, 1e-11}) CHECK(std::abs(modular_g1(1.0 + e) - 0.5) < e);
}

TEST_CASE("g2 is continuous across its removable singularities") {
  const double base = modular_g2(1.7, 0.6);
  CHECK(std::isfinite(base));
  for (double e : {1e-4, 1e-8}) {
    CHECK(std::abs(modular_g2(1.0 + e, 0.6) - modular_g2(1.0, 0.6)) < 1e2 * e);
    CHECK(std::abs(modular_g2(1.7, 1.0 + e) - modular_g2(1.7, 1.0)) < 1e2 * e);
    CHECK(std::abs(modular_g2(1.5, 1.0 / 1.5 + e) - modular_g2(1.5, 1.0 / 1.5)) < 1e2 * e);
  }
  CHECK(std::isfinite(modular_g2(1.0, 1.0)));
}

TEST_CASE("modular operator acts by conjugation") {
  Rng rng(51);
  const Mat u = random_positive(4, rng);
  const Mat b = random_matrix(4, rng);
  const ModularSpectralData ms = modular_spectrum(u);
  CHECK(rel_diff(modular_calculus([](double y) { return y; }, ms, b), u.inverse() * b * u) < 1e-12);
  CHECK(rel_diff(modular_calculus([](double) { return 1.0; }, ms, b), b) < 1e-13);
  Mat sum = Mat::Zero(4, 4);
  for (int i = 0; i < ms.size(); ++i) sum += ms.project(i, b);
  CHECK(rel_diff(sum, b) < 1e-13);
}

TEST_CASE("derivative of k = exp(h/2)") {
  Rng rng(52);
  for (int t = 0; t < 5; ++t) {
    const Mat h = random_hermitian(3, rng), dh = random_hermitian(3, rng);
    const auto [lhs, rhs] = delta_k_identity(h, dh);
    CHECK(rel_diff(lhs, rhs) < 1e-11);
  }
  // first-order finite difference as an independent check
  const Mat h = random_hermitian(3, rng), dh = random_hermitian(3, rng);
  const double e = 1e-6;
  const Mat fd = (hermitian_exp(h + e * dh, 0.5) - hermitian_exp(h - e * dh, 0.5)) / (2 * e);
  CHECK(rel_diff(delta_k_identity(h, dh).first, fd) < 1e-8);
}

TEST_CASE("Laplacian of k = exp(h/2)") {
  Rng rng(53);
  const Mat h0 = random_hermitian(3, rng);
  std::vector<Mat> h1{random_hermitian(3, rng), random_hermitian(3, rng)};
  std::vector<Mat> h2(4);
  h2[0] = random_hermitian(3, rng);
  h2[3] = random_hermitian(3, rng);
  h2[1] = h2[2] = random_hermitian(3, rng);
  RMat g(2, 2);
  g << 1.0, 0.3, 0.3, 1.4;
  const auto [lhs, rhs] = laplacian_k_identity(h0, h1, h2, g);
  CHECK(rel_diff(lhs, rhs) < 1e-11);
  CHECK_THROWS_AS(laplacian_k_identity(h0, h1, {h2[0]}, g), ValidationError);
}

TEST_CASE("rearrangement identity") {
  Rng rng(54);
  std::uniform_int_distribution<int> up(1, 3);
  for (int t = 0; t < 10; ++t) {
    const Mat u = random_positive(3, rng);
    std::vector<Mat> bs;
    const int p = up(rng);
    for (int i = 0; i < p; ++i) bs.push_back(random_matrix(3, rng));
    const auto [lhs, rhs] = rearrange([](std::span<const double> r) { return i_eval(2.0, r); }, u, bs);
    CHECK(max_abs(lhs - rhs) < 1e-12);
  }
}

TEST_CASE("composition identities") {
  Rng rng(55);
  const Mat u = random_positive(3, rng);
  const std::vector<Mat> bs{random_matrix(3, rng), random_matrix(3, rng), random_matrix(3, rng)};
  const CompositionResiduals r = composition_lemma_check(
      [](double r0, double y) { return 1.0 / (r0 + y); }, [](double r0, double y1, double y2) { return r0 * y1 / (1.0 + y2); },
      modular_g1, modular_g2, u, bs);
  CHECK(r.first < 1e-11);
  CHECK(r.second < 1e-11);
  CHECK(r.third < 1e-11);
}

TEST_CASE("modular curvature functions do not depend on r0") {
  CHECK(g_delta_ln_k(1.0, std::exp(0.3)) == doctest::Approx(0.333084).epsilon(1e-6));
  for (double y : {0.2, 1.0, std::exp(0.3), 5.0}) {
    const double ref = g_delta_ln_k(1.0, y);
    for (double r0 : {0.1, 0.5, 3.0, 10.0}) CHECK(std::abs(g_delta_ln_k(r0, y) - ref) < 1e-11);
  }
  const ModularPair ref = g_dlnk_dlnk(1.0, 0.7, 1.9);
  for (double r0 : {0.1, 2.0, 10.0}) {
    const ModularPair p = g_dlnk_dlnk(r0, 0.7, 1.9);
    CHECK(std::abs(p.metric - ref.metric) < 1e-11);
    CHECK(std::abs(p.antisym - ref.antisym) < 1e-11);
  }
}
