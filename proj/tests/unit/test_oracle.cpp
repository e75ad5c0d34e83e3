#include "heatcoeff/oracle.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace heatcoeff;

namespace {

Mat scalar(cplx c) { return Mat::Constant(1, 1, c); }

FourierOperator flat_laplacian(double u = 1.0, double w = 0.0, int N = 1) {
  FourierOperator op;
  op.g_inv = RMat::Identity(2, 2);
  op.u = FourierField::constant(2, u * identity(N));
  op.v = {FourierField(2, N), FourierField(2, N)};
  op.w = FourierField::constant(2, w * identity(N));
  return op;
}

double lattice_sum(double t, int M) {
  double s = 0.0;
  for (int k = -M; k <= M; ++k) s += std::exp(-t * k * k);
  return s;
}

}  // namespace

TEST_CASE("constant-coefficient blocks are diagonal") {
  FourierOperator op = flat_laplacian(2.0);
  op.w.modes[{1, 0}] = scalar(0.0);  // makes x active without changing the operator
  op.w.modes[{1, 0}] = scalar(1e-300);
  OracleOptions o;
  o.cutoff = 4;
  o.transverse_radius = 3;
  o.keep_matrices = true;
  const AssembledOperator a = assemble(op, o, 0.1);
  CHECK(a.basis_dim == 9);
  CHECK(a.active == std::vector<bool>{true, false});
  for (const OperatorBlock& b : a.blocks) {
    CHECK(b.hermitian);
    for (Eigen::Index i = 0; i < b.matrix.rows(); ++i) {
      const double k = a.basis[i][0];
      CHECK(std::abs(b.matrix(i, i).real() - (2.0 * k * k + b.matrix(4, 4).real())) < 1e-12);
    }
  }
  CHECK(a.hermitian_defect() < 1e-15);
}

TEST_CASE("flat Laplacian heat trace is the lattice sum") {
  OracleOptions o;
  o.cutoff = 8;
  o.transverse_radius = 8;
  const AssembledOperator a = assemble(flat_laplacian(), o, 0.05);
  const HeatTraceData data = heat_trace_data(a);
  for (double t : {0.05, 0.2, 1.0}) {
    const double s = lattice_sum(t, 8);
    CHECK(std::abs(heat_trace(data, t).real() - s * s) < 1e-12 * s * s);
  }
  // t -> infinity counts the zero modes
  CHECK(std::abs(heat_trace(data, 200.0).real() - 1.0) < 1e-12);
  const AssembledOperator a2 = assemble(flat_laplacian(1.0, 0.0, 3), o, 0.05);
  CHECK(std::abs(heat_trace(heat_trace_data(a2), 200.0).real() - 3.0) < 1e-12);
  // a rank-one projector as weight picks one copy
  Mat P = Mat::Zero(3, 3);
  P(1, 1) = 1.0;
  const FourierField w = FourierField::constant(2, P);
  FourierOperator op3 = flat_laplacian(1.0, 0.0, 3);
  op3.w.modes[{1, 0}] = Mat::Constant(3, 3, 1e-300);
  const AssembledOperator a3 = assemble(op3, o, 0.05);
  const double t = 0.3, s = lattice_sum(t, 8);
  CHECK(std::abs(heat_trace(heat_trace_data(a3, multiplication_matrix(a3, w)), t).real() - s * s) < 1e-10);
}

TEST_CASE("t window") {
  const std::vector<double> t = t_window(0.01, 1.0, 5);
  REQUIRE(t.size() == 5);
  CHECK(t.front() == doctest::Approx(0.01));
  CHECK(t.back() == doctest::Approx(1.0));
  CHECK(t[2] == doctest::Approx(0.1));
}

TEST_CASE("asymptotic fit recovers synthetic coefficients") {
  for (int d : {2, 3, 4}) {
    const std::vector<double> t = t_window(0.01, 0.5, 24);
    std::vector<double> y;
    const double c[3] = {1.3, -0.7, 0.25};
    for (double s : t) y.push_back(c[0] * std::pow(s, -d / 2.0) + c[1] * std::pow(s, 1.0 - d / 2.0) + c[2] * std::pow(s, 2.0 - d / 2.0));
    const HeatFitReport r = fit_asymptotics(t, y, d, 3);
    CAPTURE(d);
    CHECK(std::abs(r.a0() - c[0]) < 1e-12);
    CHECK(std::abs(r.a2() - c[1]) < 1e-10);
    CHECK(r.residual_norm < 1e-12);
    CHECK(r.t.size() == 24);
  }
  const std::vector<double> t = t_window(0.01, 0.5, 4);
  CHECK_THROWS_AS(fit_asymptotics(t, {1, 2, 3, 4}, 2, 3, 1.0), FitError);
  CHECK_THROWS_AS(fit_asymptotics(t, {1, 2, 3}, 2, 3), ValidationError);
}

TEST_CASE("flat Laplacian coefficients") {
  VerifyOptions o;
  o.oracle.cutoff = 24;
  o.fit.t_min = 0.01;
  const HeatFitReport r = verify_fourier(flat_laplacian(), std::nullopt, o);
  CHECK(std::abs(r.a0() - std::numbers::pi) < 1e-6);
  CHECK(std::abs(r.a2()) < 1e-4);
}

TEST_CASE("constant potential: a2 = pi c") {
  const double c = 0.1;
  VerifyOptions o;
  o.oracle.cutoff = 24;
  o.fit.n_terms = 5;
  const HeatFitReport r = verify_fourier(flat_laplacian(1.0, c), std::nullopt, o);
  REQUIRE(r.closed_form_a2.has_value());
  CHECK(std::abs(*r.closed_form_a2 - std::numbers::pi * c) < 1e-12);
  CHECK(std::abs(r.a2() - std::numbers::pi * c) < 1e-6);
}

TEST_CASE("variable coefficients with a weight") {
  FourierOperator op = flat_laplacian();
  op.u = FourierField(2, 1);
  op.u.modes[{0, 0}] = scalar(1.045);
  op.u.modes[{1, 0}] = op.u.modes[{-1, 0}] = scalar(0.3);
  op.u.modes[{2, 0}] = op.u.modes[{-2, 0}] = scalar(0.0225);
  FourierField w(2, 1);
  w.modes[{1, 0}] = w.modes[{-1, 0}] = scalar(0.5);
  VerifyOptions o;
  o.oracle.cutoff = 24;
  const std::vector<HeatFitReport> rs = verify_fourier(op, {std::optional<FourierField>(w), std::nullopt}, o);
  REQUIRE(rs.size() == 2);
  REQUIRE(rs[0].delta.has_value());
  CHECK(*rs[0].delta < 0.02);
  // with weight 1 the closed form vanishes and the fit must be small on the a0 scale
  CHECK(std::abs(rs[1].a2()) < 0.02 * std::abs(rs[1].a0()));
  const HeatFitReport single = verify_fourier(op, w, o);
  CHECK(std::abs(single.a2() - rs[0].a2()) < 1e-12);
}

TEST_CASE("GNS assembly on the noncommutative two-torus") {
  const std::vector<Rational> th{{1, 2}};
  NctElement k = NctElement::scalar(1, th, 1.0);
  k.add({1, 0}, 0.05);
  k.add({-1, 0}, 0.05);
  OracleOptions o;
  o.cutoff = 6;
  o.keep_matrices = true;
  const AssembledOperator a = assemble_nct2(k, cplx(0.3, 1.1), o);
  CHECK(a.blocks.size() == 2);
  CHECK(a.hermitian_defect() < 1e-12);
  CHECK(a.min_real_eigenvalue() > -1e-10);
  const NctElement one = NctElement::scalar(1, th, 1.0);
  const AssembledOperator flat = assemble_nct2(one, cplx(0.0, 1.0), o);
  // k = 1, tau = i: both blocks are diag(a^2 + b^2)
  for (const OperatorBlock& b : flat.blocks)
    for (size_t i = 0; i < flat.basis.size(); ++i) {
      const auto& m = flat.basis[i];
      CHECK(std::abs(b.matrix(i, i) - cplx(m[0] * m[0] + m[1] * m[1])) < 1e-13);
    }
  NctElement bad = k;
  bad.add({0, 1}, cplx(0.0, 0.3));
  CHECK_THROWS_AS(assemble_nct2(bad, cplx(0.0, 1.0), o), DomainError);
  o.max_block_dim = 10;
  CHECK_THROWS_AS(assemble_nct2(k, cplx(0.0, 1.0), o), SizeError);
}

TEST_CASE("commutative two-torus: GNS oracle against the closed form") {
  const std::vector<Rational> th{{0, 1}};
  NctElement h(1, th);
  h.add({1, 0}, 0.1);
  h.add({-1, 0}, 0.1);
  const NctElement k = nct_function(h, [](double v) { return std::exp(0.5 * v); }, 6, 16);
  NctElement weight(1, th);
  weight.add({1, 0}, 0.5);
  weight.add({-1, 0}, 0.5);
  VerifyOptions o;
  o.oracle.cutoff = 12;
  o.nct.radius = 6;
  o.nct.points = 16;
  const HeatFitReport r = verify_nct2(k, cplx(0.0, 1.0), weight, o);
  REQUIRE(r.delta.has_value());
  CHECK(*r.delta < 0.02);
}

TEST_CASE("size cap") {
  OracleOptions o;
  o.cutoff = 40;
  o.max_block_dim = 100;
  FourierOperator op = flat_laplacian();
  op.u.modes[{1, 1}] = scalar(0.1);
  op.u.modes[{-1, -1}] = scalar(0.1);
  CHECK_THROWS_AS(assemble(op, o), SizeError);
}
