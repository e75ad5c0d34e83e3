#include "heatcoeff/errors.hpp"
#include "heatcoeff/geometry.hpp"
#include "support/random_fields.hpp"

#include <doctest.h>

#include <cmath>

using namespace heatcoeff;
using namespace heatcoeff::testing;

namespace {

// g = dx^2 + e^{2x} dy^2 at x = 0, given through g^{-1} = diag(1, e^{-2x})
MetricJet exponential_metric() {
  RMat d0 = RMat::Zero(2, 2), dd00 = RMat::Zero(2, 2);
  d0(1, 1) = -2.0;
  dd00(1, 1) = 4.0;
  return MetricJet::from_arrays(RMat::Identity(2, 2), {d0, RMat::Zero(2, 2)},
                                {dd00, RMat::Zero(2, 2), RMat::Zero(2, 2), RMat::Zero(2, 2)});
}

// round sphere of radius a in (theta, phi) at theta = th
MetricJet sphere_metric(double a, double th) {
  const double s = std::sin(th), c = std::cos(th);
  RMat g = RMat::Zero(2, 2), d0 = RMat::Zero(2, 2), dd00 = RMat::Zero(2, 2);
  g(0, 0) = 1.0 / (a * a);
  g(1, 1) = 1.0 / (a * a * s * s);
  d0(1, 1) = -2.0 * c / (a * a * s * s * s);
  dd00(1, 1) = (6.0 * c * c / (s * s * s * s) + 2.0 / (s * s)) / (a * a);
  return MetricJet::from_arrays(g, {d0, RMat::Zero(2, 2)},
                                {dd00, RMat::Zero(2, 2), RMat::Zero(2, 2), RMat::Zero(2, 2)});
}

// flat plane in polar coordinates at radius r
MetricJet polar_metric(double r) {
  RMat g = RMat::Zero(2, 2), d0 = RMat::Zero(2, 2), dd00 = RMat::Zero(2, 2);
  g(0, 0) = 1.0;
  g(1, 1) = 1.0 / (r * r);
  d0(1, 1) = -2.0 / (r * r * r);
  dd00(1, 1) = 6.0 / (r * r * r * r);
  return MetricJet::from_arrays(g, {d0, RMat::Zero(2, 2)},
                                {dd00, RMat::Zero(2, 2), RMat::Zero(2, 2), RMat::Zero(2, 2)});
}

}  // namespace

TEST_CASE("Christoffel symbols of diag(1, e^{2x})") {
  const MetricData m = metric_data(exponential_metric());
  CHECK(m.Gamma(1, 0, 1).v == doctest::Approx(1.0));
  CHECK(m.Gamma(1, 1, 0).v == doctest::Approx(1.0));
  CHECK(m.Gamma(0, 1, 1).v == doctest::Approx(-1.0));
  CHECK(std::abs(m.Gamma(0, 0, 0).v) < 1e-15);
  CHECK(std::abs(m.Gamma(1, 1, 1).v) < 1e-15);
  const std::vector<double> flat = christoffel(exponential_metric());
  CHECK(flat[(1 * 2 + 0) * 2 + 1] == doctest::Approx(1.0));
  CHECK(m.scalar_curvature == doctest::Approx(-2.0));
}

TEST_CASE("scalar curvature of spheres and of the flat plane") {
  for (double th : {0.4, 1.0, M_PI / 2}) {
    CHECK(scalar_curvature(sphere_metric(1.0, th)) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(scalar_curvature(sphere_metric(2.0, th)) == doctest::Approx(0.5).epsilon(1e-12));
  }
  CHECK(std::abs(scalar_curvature(polar_metric(1.5))) < 1e-13);
  CHECK(scalar_curvature(MetricJet::constant(RMat::Identity(3, 3))) == 0.0);
}

TEST_CASE("alpha combination equals R/6") {
  Rng rng(31);
  for (int d : {2, 3, 4, 6})
    for (int t = 0; t < 5; ++t) {
      const MetricJet g = random_metric_jet(d, rng);
      CAPTURE(d);
      CHECK(std::abs(alpha_combination(g) - scalar_curvature(g) / 6.0) < 1e-10);
    }
  CHECK(alpha_combination(sphere_metric(1.0, 0.7)) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("gamma trace is g^{mu nu} Gamma^rho_{mu nu}") {
  Rng rng(32);
  for (int d : {2, 3, 4}) {
    const MetricJet g = random_metric_jet(d, rng);
    const MetricData m = metric_data(g);
    const RMat gi = g.g_inv();
    for (int rho = 0; rho < d; ++rho) {
      double s = 0.0;
      for (int mu = 0; mu < d; ++mu)
        for (int nu = 0; nu < d; ++nu) s += gi(mu, nu) * m.Gamma(rho, mu, nu).v;
      CHECK(std::abs(m.gamma_trace[rho].v - s) < 1e-12);
      const AlphaBeta ab = alpha_beta(g);
      CHECK(std::abs(m.gamma_trace[rho].v - (ab.alpha_up(rho) / 2.0 - ab.beta_up(rho))) < 1e-12);
    }
  }
}

TEST_CASE("lowered metric jet inverts the upper one") {
  Rng rng(33);
  const MetricJet g = random_metric_jet(3, rng);
  const MetricData m = metric_data(g);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      RJet s(0.0, 3, 2);
      for (int c = 0; c < 3; ++c) s = s + g.up(a, c) * m.lower(c, b);
      CHECK(std::abs(s.v - (a == b ? 1.0 : 0.0)) < 1e-13);
      for (int mu = 0; mu < 3; ++mu) CHECK(std::abs(s.d[mu]) < 1e-13);
      for (double x : s.dd) CHECK(std::abs(x) < 1e-12);
    }
}

TEST_CASE("metric validation") {
  RMat bad(2, 2);
  bad << 1.0, 0.2, 0.3, 1.0;
  CHECK_THROWS_AS(MetricJet::constant(bad).validate(), DomainError);
  CHECK_THROWS_AS(MetricJet::constant(-RMat::Identity(2, 2)).validate(), DomainError);
  CHECK_NOTHROW(MetricJet::constant(RMat::Identity(2, 2)).validate());
}

TEST_CASE("coordinate and covariant fields round trip") {
  Rng rng(34);
  for (int d : {2, 3}) {
    const MetricJet g = random_metric_jet(d, rng);
    const MetricData m = metric_data(g);
    const PointFieldsUVW f = random_uvw(2, d, rng);
    const PointFieldsUPQ c = uvw_to_upq(m, g, f, random_connection(2, d, rng));
    const PointFieldsUVW back = upq_to_uvw(m, g, c);
    CHECK(max_abs(back.u.v - f.u.v) < 1e-12);
    for (int mu = 0; mu < d; ++mu) CHECK(max_abs(back.v[mu].v - f.v[mu].v) < 1e-12);
    CHECK(max_abs(back.w.v - f.w.v) < 1e-12);
    for (int mu = 0; mu < d; ++mu)
      for (int nu = 0; nu < d; ++nu) CHECK(max_abs(back.v[mu].d[nu] - f.v[mu].d[nu]) < 1e-12);
  }
}

TEST_CASE("gauge shift with u = 1 and flat metric") {
  const int d = 2;
  const MetricJet g = MetricJet::constant(RMat::Identity(d, d));
  const MetricData m = metric_data(g);
  PointFieldsUPQ f;
  f.u = MatJet(identity(1), d, 2);
  f.p = {MatJet(Mat::Zero(1, 1), d, 1), MatJet(Mat::Zero(1, 1), d, 1)};
  f.q = MatJet(Mat::Zero(1, 1), d, 0);
  f.A = {MatJet(Mat::Zero(1, 1), d, 1), MatJet(Mat::Zero(1, 1), d, 1)};
  std::vector<MatJet> phi;
  for (int mu = 0; mu < d; ++mu) {
    MatJet p(Mat::Constant(1, 1, cplx(0.0, 0.5 + mu)), d, 1);
    p.d[mu] = Mat::Constant(1, 1, cplx(0.0, 0.2));
    phi.push_back(p);
  }
  const PointFieldsUPQ s = gauge_shift(m, g, f, phi);
  // p' = -2 phi, q' = -div phi + phi.phi
  for (int mu = 0; mu < d; ++mu) CHECK(std::abs(s.p[mu].v(0, 0) + 2.0 * phi[mu].v(0, 0)) < 1e-14);
  const cplx expect = -2.0 * cplx(0.0, 0.2) + phi[0].v(0, 0) * phi[0].v(0, 0) + phi[1].v(0, 0) * phi[1].v(0, 0);
  CHECK(std::abs(s.q.v(0, 0) - expect) < 1e-14);
  for (int mu = 0; mu < d; ++mu) CHECK(std::abs(s.A[mu].v(0, 0) - phi[mu].v(0, 0)) < 1e-14);
}

TEST_CASE("Sylvester solve") {
  Mat u = Mat::Zero(2, 2);
  u(0, 0) = 1.0;
  u(1, 1) = 3.0;
  Mat p(2, 2);
  p << 0.0, 1.0, 1.0, 0.0;
  const Mat x = solve_sylvester(u, p);
  CHECK(std::abs(x(0, 1) - 0.25) < 1e-15);
  CHECK(std::abs(x(1, 0) - 0.25) < 1e-15);
  CHECK(std::abs(x(0, 0)) < 1e-15);
  Rng rng(35);
  const Mat U = random_positive(4, rng), P = random_matrix(4, rng);
  const Mat X = solve_sylvester(U, P);
  CHECK(max_abs(U * X + X * U - P) < 1e-12);
}

TEST_CASE("solve_phi_p_zero removes p") {
  Rng rng(36);
  for (int d : {2, 4}) {
    const MetricJet g = random_metric_jet(d, rng);
    const MetricData m = metric_data(g);
    const PointFieldsUPQ f = random_upq(2, d, rng);
    const PointFieldsUPQ s = gauge_shift(m, g, f, solve_phi_p_zero(f, g));
    for (int mu = 0; mu < d; ++mu) {
      CHECK(max_abs(s.p[mu].v) < 1e-12);
      for (int nu = 0; nu < d; ++nu) CHECK(max_abs(s.p[mu].d[nu]) < 1e-11);
    }
    std::vector<Mat> pv;
    for (const auto& p : f.p) pv.push_back(p.v);
    const std::vector<Mat> phi = solve_phi_p_zero(f.u.v, pv, g.g_inv());
    const std::vector<MatJet> phij = solve_phi_p_zero(f, g);
    for (int mu = 0; mu < d; ++mu) CHECK(max_abs(phi[mu] - phij[mu].v) < 1e-13);
  }
}

TEST_CASE("matrix jet algebra") {
  Rng rng(37);
  const MatJet a = random_mat_jet(3, 2, 2, rng, false);
  MatJet g = random_positive_jet(3, 2, rng);
  const MatJet prod = inverse(g) * g;
  CHECK(max_abs(prod.v - identity(3)) < 1e-12);
  for (const Mat& x : prod.d) CHECK(max_abs(x) < 1e-12);
  for (const Mat& x : prod.dd) CHECK(max_abs(x) < 1e-12);
  // Leibniz rule against the Taylor polynomial of the product
  const MatJet b = random_mat_jet(3, 2, 2, rng, false);
  const MatJet ab = a * b;
  const std::vector<double> x{1e-4, -2e-4};
  const Mat exact = taylor_value(a, x) * taylor_value(b, x);
  CHECK(max_abs(taylor_value(ab, x) - exact) < 1e-10);
  const MatJet da = partial(a, 1);
  CHECK(da.order == 1);
  CHECK(max_abs(da.v - a.d[1]) == 0.0);
}
