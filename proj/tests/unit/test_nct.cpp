#include "heatcoeff/nct.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace heatcoeff;

namespace {

NctElement random_element(int m, const std::vector<Rational>& th, Rng& rng, int radius = 1) {
  std::normal_distribution<double> nd;
  NctElement x(m, th);
  NctIndex k(2 * m, -radius);
  // odometer over [-radius, radius]^{2m}
  for (;;) {
    x.add(k, cplx(nd(rng), nd(rng)));
    int i = 0;
    while (i < 2 * m && ++k[i] > radius) k[i++] = -radius;
    if (i == 2 * m) break;
  }
  return x;
}

// small self-adjoint h, so exp(h/2) stays positive and smooth
NctElement small_hermitian(int m, const std::vector<Rational>& th) {
  NctElement h(m, th);
  NctIndex k(2 * m, 0);
  k[0] = 1;
  h.add(k, 0.1);
  k[0] = -1;
  h.add(k, 0.1);
  k[0] = 0;
  k[1] = 1;
  h.add(k, cplx(0.0, 0.05));
  k[1] = -1;
  h.add(k, cplx(0.0, -0.05));
  return h;
}

}  // namespace

TEST_CASE("clock and shift matrices") {
  for (long q : {2L, 3L, 5L})
    for (long p = 1; p < q; ++p) {
      if (std::gcd(p, q) != 1) continue;
      const auto [U, V] = clock_shift(q, p);
      const cplx xi = std::polar(1.0, 2.0 * std::numbers::pi * p / q);
      CHECK(max_abs(U * V - xi * V * U) < 1e-14);
      CHECK(max_abs(U * U.adjoint() - identity(static_cast<int>(q))) < 1e-15);
      Mat Uq = identity(static_cast<int>(q));
      for (long i = 0; i < q; ++i) Uq = Uq * U;
      CHECK(max_abs(Uq - identity(static_cast<int>(q))) < 1e-14);
    }
  CHECK_THROWS_AS(clock_shift(4, 2), ValidationError);
  CHECK_THROWS_AS(clock_shift(0, 1), ValidationError);
}

TEST_CASE("realisation of the generators") {
  const std::vector<Rational> th{{1, 3}};
  const auto [U0, V0] = clock_shift(3, 1);
  const std::vector<double> x{0.7, -1.2};
  const NctElement U = NctElement::monomial(1, th, {1, 0});
  const NctElement V = NctElement::monomial(1, th, {0, 1});
  CHECK(max_abs(realize(U, x) - std::polar(1.0, 0.7) * U0) < 1e-15);
  CHECK(max_abs(realize(V, x) - std::polar(1.0, -1.2) * V0) < 1e-15);
  CHECK(realize(U, x).rows() == 3);
  CHECK(U.fiber_dim() == 3);
}

TEST_CASE("trace, adjoint and derivations") {
  const std::vector<Rational> th{{2, 5}};
  CHECK(nct_trace(NctElement::scalar(1, th, 1.0)) == cplx(1.0));
  const NctElement U = NctElement::monomial(1, th, {1, 0});
  CHECK(nct_trace(U) == cplx(0.0));
  CHECK(nct_trace(U * adjoint(U)) == cplx(1.0));
  const NctElement dU = nct_derive(U, 0);
  CHECK(dU.coeff({1, 0}) == cplx(0.0, 1.0));
  CHECK(nct_derive(U, 1).coeff({1, 0}) == cplx(0.0));
  Rng rng(61);
  const NctElement x = random_element(1, th, rng), y = random_element(1, th, rng);
  for (int mu = 0; mu < 2; ++mu) {
    const NctElement lhs = nct_derive(x * y, mu);
    const NctElement rhs = nct_derive(x, mu) * y + x * nct_derive(y, mu);
    const NctElement diff = lhs - rhs;
    for (const auto& [k, c] : diff.coeffs) CHECK(std::abs(c) < 1e-13);
  }
  // trace is tracial and vanishes on derivatives
  CHECK(std::abs(nct_trace(x * y) - nct_trace(y * x)) < 1e-13);
  CHECK(std::abs(nct_trace(nct_derive(x, 0))) < 1e-15);
}

TEST_CASE("commutation relation") {
  const std::vector<Rational> th{{1, 4}};
  const NctElement U = NctElement::monomial(1, th, {1, 0});
  const NctElement V = NctElement::monomial(1, th, {0, 1});
  const cplx xi = std::polar(1.0, 2.0 * std::numbers::pi / 4.0);
  const NctElement diff = U * V - xi * (V * U);
  for (const auto& [k, c] : diff.coeffs) CHECK(std::abs(c) < 1e-15);
}

TEST_CASE("realisation is a *-homomorphism") {
  Rng rng(62);
  for (const auto& th : {std::vector<Rational>{{1, 2}}, std::vector<Rational>{{1, 3}}, std::vector<Rational>{{0, 1}}}) {
    const NctElement x = random_element(1, th, rng), y = random_element(1, th, rng);
    NctRealizer re(x);
    for (const auto& pt : {std::vector<double>{0.1, 0.2}, std::vector<double>{2.4, -1.0}}) {
      CHECK(max_abs(re(x * y, pt) - re(x, pt) * re(y, pt)) < 1e-12);
      CHECK(max_abs(re(adjoint(x), pt) - re(x, pt).adjoint()) < 1e-13);
      CHECK(max_abs(re(x + y, pt) - re(x, pt) - re(y, pt)) < 1e-13);
    }
  }
  const std::vector<Rational> th4{{1, 2}, {1, 3}};
  const NctElement a = random_element(2, th4, rng), b = random_element(2, th4, rng);
  const std::vector<double> pt{0.3, 0.1, -0.4, 1.2};
  NctRealizer re(a);
  CHECK(re.fiber() == 6);
  CHECK(max_abs(re(a * b, pt) - re(a, pt) * re(b, pt)) < 1e-11);
}

TEST_CASE("realisation jets differentiate exactly") {
  Rng rng(63);
  const std::vector<Rational> th{{1, 3}};
  const NctElement x = random_element(1, th, rng);
  NctRealizer re(x);
  const std::vector<double> pt{0.5, 0.9};
  const MatJet j = re.jet(x, pt, 2);
  CHECK(max_abs(j.d[0] - re(nct_derive(x, 0), pt)) < 1e-13);
  CHECK(max_abs(j.dd_at(0, 1) - re(nct_derive(nct_derive(x, 0), 1), pt)) < 1e-12);
  const double e = 1e-5;
  const Mat fd = (re(x, {0.5 + e, 0.9}) - re(x, {0.5 - e, 0.9})) / (2 * e);
  CHECK(max_abs(j.d[0] - fd) < 1e-8);
}

TEST_CASE("equivariance of the realisation") {
  Rng rng(64);
  const std::vector<Rational> th{{2, 5}};
  const NctElement x = random_element(1, th, rng);
  for (int m = 0; m < 3; ++m)
    for (int n = 0; n < 3; ++n) CHECK(equivariance_residual(x, {0.3, 1.1}, 0, m, n) < 1e-12);
}

TEST_CASE("trace correspondence") {
  Rng rng(65);
  const std::vector<Rational> th{{1, 3}};
  const NctElement x = random_element(1, th, rng, 2);
  for (cplx tau : {cplx(0.0, 1.0), cplx(0.3, 1.1), cplx(-0.5, 2.0)}) {
    const std::vector<RMat> g{tau_metric(tau)};
    CHECK(std::abs(phi_correspondence(x, g) - phi_expected(x, g)) < 1e-10);
  }
  const std::vector<Rational> th4{{1, 2}, {1, 2}};
  const NctElement y = random_element(2, th4, rng);
  const std::vector<RMat> g4{RMat::Identity(2, 2), tau_metric(cplx(0.2, 1.3))};
  CHECK(std::abs(phi_correspondence(y, g4) - phi_expected(y, g4)) < 1e-8 * std::abs(phi_expected(y, g4)) + 1e-10);
}

TEST_CASE("tau metric and its Hermitian form") {
  CHECK(max_abs(tau_metric(cplx(0.0, 1.0)).cast<cplx>() - identity(2)) < 1e-15);
  const cplx tau(1.0, 2.0);
  const Eigen::Matrix2cd h = tau_h(tau), f = tau_f(tau);
  const Eigen::Matrix2cd g = tau_metric(tau).cast<cplx>();
  CHECK((h - g - f).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(g(0, 1).real() == doctest::Approx(1.0));
  CHECK(g(1, 1).real() == doctest::Approx(5.0));
  CHECK(std::abs(f(0, 0)) == 0.0);
  CHECK(std::abs(f(0, 1) + f(1, 0)) < 1e-15);
}

TEST_CASE("sampling and coefficient extraction round trip") {
  Rng rng(66);
  const std::vector<Rational> th{{1, 2}};
  const NctElement x = random_element(1, th, rng, 2);
  const SampleGrid grid = sample_grid_for(x, 8);
  const NctElement back = extract_coefficients(x, grid, sample(x, grid), 3);
  const NctElement diff = back - x;
  for (const auto& [k, c] : diff.coeffs) CHECK(std::abs(c) < 1e-13);
  const std::vector<MatJet> jets = sample_jets(x, grid, 1);
  const std::vector<Mat> dx = sample(nct_derive(x, 1), grid);
  for (size_t i = 0; i < jets.size(); ++i) CHECK(max_abs(jets[i].d[1] - dx[i]) < 1e-12);
}

TEST_CASE("functional calculus agrees with the Taylor exponential") {
  const std::vector<Rational> th{{1, 3}};
  const NctElement h = small_hermitian(1, th);
  const NctElement a = nct_function(h, [](double v) { return std::exp(0.5 * v); }, 8, 24);
  const NctElement b = nct_exp_taylor(h, 0.5, 8);
  const NctElement diff = a - b;
  for (const auto& [k, c] : diff.coeffs) CHECK(std::abs(c) < 1e-12);
  const NctElement sq = multiply(a, a, 8);
  const NctElement e = nct_exp_taylor(h, 1.0, 8);
  for (const auto& [k, c] : (sq - e).coeffs) CHECK(std::abs(c) < 1e-12);
}

TEST_CASE("flat conformal factors have zero density") {
  const std::vector<Rational> th{{1, 2}};
  NctCurvatureOptions opt;
  opt.radius = 2;
  opt.points = 8;
  for (double c : {1.0, 1.7}) {
    const Nct2Curvature r = nct2_curvature(NctElement::scalar(1, th, c), cplx(0.3, 1.1), opt);
    for (const Mat& s : r.samples) CHECK(max_abs(s) < 1e-14);
    const std::vector<Rational> th4{{1, 2}, {1, 3}};
    const Nct4Curvature r4 = nct4_curvature(NctElement::scalar(2, th4, c), RMat::Identity(4, 4), opt);
    for (const Mat& s : r4.samples) CHECK(max_abs(s) < 1e-14);
  }
}

TEST_CASE("two-torus density matches the closed form") {
  const std::vector<Rational> th{{1, 2}};
  const NctElement k = nct_function(small_hermitian(1, th), [](double v) { return std::exp(0.5 * v); }, 6, 16);
  NctCurvatureOptions opt;
  opt.radius = 6;
  opt.points = 16;
  const Nct2Curvature r = nct2_curvature(k, cplx(0.3, 1.1), opt);
  CHECK(r.closed_form_residual < 1e-10);
  // Gauss-Bonnet: the integrated scalar density vanishes
  CHECK(std::abs(nct_trace(r.R2)) < 1e-8);
}

TEST_CASE("four-torus density matches the corollary") {
  const std::vector<Rational> th{{1, 2}, {1, 3}};
  const NctElement k = nct_function(small_hermitian(2, th), [](double v) { return std::exp(0.5 * v); }, 3, 8);
  NctCurvatureOptions opt;
  opt.radius = 3;
  opt.points = 8;
  RMat g = RMat::Identity(4, 4);
  g(0, 1) = g(1, 0) = 0.2;
  const Nct4Curvature r = nct4_curvature(k, g, opt);
  CHECK(r.corollary_residual < 1e-10);
}

TEST_CASE("validation") {
  CHECK_THROWS_AS(NctElement(1, {{1, 0}}), ValidationError);
  CHECK_THROWS_AS(NctElement(2, {{1, 2}}), ValidationError);
  const NctElement a = NctElement::scalar(1, {{1, 2}}, 1.0), b = NctElement::scalar(1, {{1, 3}}, 1.0);
  CHECK_THROWS_AS(a * b, ValidationError);
  NctCurvatureOptions opt;
  opt.radius = 4;
  opt.points = 6;
  CHECK_THROWS_AS(nct2_curvature(a, cplx(0.0, 1.0), opt), ValidationError);
}
