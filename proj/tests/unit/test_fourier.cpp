#include "heatcoeff/fourier.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace heatcoeff;

namespace {

Mat scalar(cplx c) { return Mat::Constant(1, 1, c); }

// (1 + 0.3 cos x)^2 written out in modes
FourierField bump_squared() {
  FourierField u(2, 1);
  u.modes[{0, 0}] = scalar(1.045);
  u.modes[{1, 0}] = u.modes[{-1, 0}] = scalar(0.3);
  u.modes[{2, 0}] = u.modes[{-2, 0}] = scalar(0.0225);
  return u;
}

}  // namespace

TEST_CASE("field evaluation and jets") {
  const FourierField u = bump_squared();
  for (double x : {0.0, 0.4, 2.0}) {
    const double ref = std::pow(1.0 + 0.3 * std::cos(x), 2);
    CHECK(std::abs(u.value({x, 1.3})(0, 0) - ref) < 1e-14);
    const MatJet j = u.jet({x, 1.3}, 2);
    const double dref = -2.0 * 0.3 * std::sin(x) * (1.0 + 0.3 * std::cos(x));
    CHECK(std::abs(j.d[0](0, 0) - dref) < 1e-14);
    CHECK(std::abs(j.d[1](0, 0)) < 1e-15);
    CHECK(max_abs(j.d[0] - derive(u, 0).value({x, 1.3})) < 1e-14);
  }
  CHECK(u.radius() == 2);
  CHECK(u.active_axes() == std::vector<bool>{true, false});
}

TEST_CASE("products, adjoints and truncation") {
  const FourierField u = bump_squared();
  FourierField a = FourierField::mode({1, 0}, scalar(cplx(0.0, 1.0)));
  a.dim = 2;
  const FourierField p = u * a;
  const std::vector<double> x{0.9, 0.1};
  CHECK(std::abs(p.value(x)(0, 0) - u.value(x)(0, 0) * a.value(x)(0, 0)) < 1e-14);
  CHECK(std::abs(adjoint(a).value(x)(0, 0) - std::conj(a.value(x)(0, 0))) < 1e-15);
  CHECK(multiply(u, u, 2).radius() == 2);
  CHECK(multiply(u, u).radius() == 4);
}

TEST_CASE("samples round trip through the DFT") {
  const FourierField u = bump_squared();
  const std::vector<int> n{16, 1};
  std::vector<Mat> s;
  for (const auto& x : torus_points(n)) s.push_back(u.value(x));
  const FourierField back = FourierField::from_samples(n, s, 7);
  for (const auto& [k, c] : u.modes) CHECK(max_abs(back.coeff(k) - c) < 1e-15);
  CHECK(back.radius() == 2);
  const std::vector<Mat> dft = truncated_dft(n, s, 3);
  CHECK(dft.size() == 7);
  CHECK(std::abs(dft[3](0, 0) - 1.045) < 1e-15);
  CHECK(std::abs(dft[4](0, 0) - 0.3) < 1e-15);
  const FourierField f = FourierField::from_function(2, 1, {16, 1}, [&](const std::vector<double>& x) { return u.value(x); }, 7);
  CHECK(max_abs(f.coeff({2, 0}) - u.coeff({2, 0})) < 1e-15);
}

TEST_CASE("explicit grid route matches the Fourier route") {
  FourierOperator op;
  op.g_inv = RMat::Identity(2, 2);
  op.u = bump_squared();
  op.v = {FourierField(2, 1), FourierField(2, 1)};
  op.v[0].modes[{1, 0}] = scalar(0.1);
  op.v[0].modes[{-1, 0}] = scalar(0.1);
  op.w = FourierField::constant(2, scalar(0.2));
  const HeatDensityResult a = fourier_heat_density(op, 16);

  FourierOperator sampled;
  sampled.g_inv = op.g_inv;
  const std::vector<int> n{16, 16};
  auto resample = [&](const FourierField& f) {
    std::vector<Mat> s;
    for (const auto& x : torus_points(n)) s.push_back(f.value(x));
    return FourierField::from_samples(n, s, 7);
  };
  sampled.u = resample(op.u);
  sampled.v = {resample(op.v[0]), resample(op.v[1])};
  sampled.w = resample(op.w);
  const HeatDensityResult b = fourier_heat_density(sampled, 16);
  REQUIRE(a.R2.size() == b.R2.size());
  for (size_t i = 0; i < a.R2.size(); ++i) CHECK(max_abs(a.R2[i] - b.R2[i]) < 1e-13);
  CHECK(std::abs(a2_integrate({}, a) - a2_integrate({}, b)) < 1e-12);
  // y is inactive: a single sample on that axis
  CHECK(a.grid.n == std::vector<int>{16, 1});
}

TEST_CASE("density forms agree on the grid") {
  FourierOperator op = conformal_like_operator(RMat::Identity(2, 2), [] {
    FourierField k(2, 1);
    k.modes[{0, 0}] = scalar(1.0);
    k.modes[{1, 1}] = k.modes[{-1, -1}] = scalar(0.1);
    return k;
  }());
  const HeatDensityResult a = fourier_heat_density(op, 12, DensityForm::coordinate);
  const HeatDensityResult b = fourier_heat_density(op, 12, DensityForm::covariant);
  const HeatDensityResult c = fourier_heat_density(op, 12, DensityForm::corollary);
  CHECK(a.form_used == FormUsed::coordinate);
  CHECK(c.form_used == FormUsed::corollary_d2);
  for (size_t i = 0; i < a.R2.size(); ++i) {
    CHECK(max_abs(a.R2[i] - b.R2[i]) < 1e-12);
    CHECK(max_abs(b.R2[i] - c.R2[i]) < 1e-12);
  }
  // Gauss-Bonnet on the flat torus: the total vanishes
  CHECK(std::abs(a2_integrate({}, a)) < 1e-10);
}

TEST_CASE("covariant construction") {
  const FourierField u = bump_squared();
  FourierField p0(2, 1), q = FourierField::constant(2, scalar(0.4));
  p0.modes[{0, 1}] = scalar(0.2);
  const FourierOperator op = operator_from_upq(RMat::Identity(2, 2), u, {p0, FourierField(2, 1)}, q);
  const std::vector<double> x{0.3, 0.8};
  CHECK(max_abs(op.v[0].value(x) - (p0.value(x) + derive(u, 0).value(x))) < 1e-14);
  CHECK(max_abs(op.w.value(x) - q.value(x)) < 1e-15);
  CHECK(op.active_axes() == std::vector<bool>{true, true});
}

TEST_CASE("operator validation") {
  FourierOperator op;
  op.g_inv = RMat::Identity(2, 2);
  op.u = bump_squared();
  op.v = {FourierField(2, 1)};
  op.w = FourierField(2, 1);
  CHECK_THROWS_AS(op.validate(), ValidationError);
}
