#include "heatcoeff/linalg.hpp"
#include "heatcoeff/spectral_functions.hpp"

#include <doctest.h>

#include <cmath>

using namespace heatcoeff;

namespace {
double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

SpectralOptions quadrature_backend() {
  SpectralOptions o;
  o.backend = IBackend::quadrature;
  return o;
}
}  // namespace

TEST_CASE("G_q is I_{d/2,1}") {
  const GFunctions g4 = g_generic(4);
  CHECK(rel(g4.q(2.0, 3.0), 1.0 / 6.0) < 1e-14);
  const GFunctions g2 = g_generic(2);
  CHECK(rel(g2.q(1.0, 4.0), std::log(4.0) / 3.0) < 1e-14);
}

TEST_CASE("minimal case values at r = 1") {
  for (int d : {2, 3, 4, 6}) {
    const GFunctions g = g_generic(d);
    CAPTURE(d);
    CHECK(std::abs(g.q(1, 1) - 1.0) < 1e-13);
    CHECK(std::abs(g.dp(1, 1) + 0.5) < 1e-13);
    CHECK(std::abs(g.pp(1, 1, 1) + 0.25) < 1e-13);
  }
}

TEST_CASE("relations between the G functions hold") {
  Rng rng(21);
  std::uniform_real_distribution<double> ur(0.2, 5.0);
  for (int d : {2, 3, 4, 5, 6}) {
    const GFunctions g = g_generic(d);
    for (int t = 0; t < 20; ++t) {
      const double r0 = ur(rng), r1 = ur(rng), r2 = ur(rng);
      CAPTURE(d);
      CHECK(g_relations_residual(g, r0, r1, r2) < 1e-10);
    }
  }
}

TEST_CASE("vanishing combinations of the F functions") {
  Rng rng(22);
  std::uniform_real_distribution<double> ur(0.2, 5.0);
  for (int d : {2, 3, 4, 6}) {
    const FFunctions f = f_generic(d);
    for (int t = 0; t < 10; ++t) {
      const VanishingCombinations v = vanishing_combinations(f, ur(rng), ur(rng));
      CHECK(std::abs(v.grad_u.alpha) < 1e-12);
      CHECK(std::abs(v.grad_u.beta) < 1e-12);
      CHECK(std::abs(v.p.alpha) < 1e-12);
      CHECK(std::abs(v.p.beta) < 1e-12);
    }
  }
}

TEST_CASE("closed forms agree with the generic path") {
  Rng rng(23);
  std::uniform_real_distribution<double> ur(0.2, 5.0);
  for (int d : {2, 3, 4, 6, 8}) {
    const GFunctions c = g_closed(d), g = g_generic(d);
    CAPTURE(d);
    for (int t = 0; t < 10; ++t) {
      const double r0 = ur(rng), r1 = ur(rng), r2 = ur(rng);
      CHECK(rel(c.q(r0, r1), g.q(r0, r1)) < 1e-10);
      CHECK(rel(c.ddu(r0, r1), g.ddu(r0, r1)) < 1e-10);
      CHECK(rel(c.dp(r0, r1), g.dp(r0, r1)) < 1e-10);
      CHECK(rel(c.dudu(r0, r1, r2), g.dudu(r0, r1, r2)) < 1e-9);
      CHECK(rel(c.pdu(r0, r1, r2), g.pdu(r0, r1, r2)) < 1e-9);
      CHECK(rel(c.dup(r0, r1, r2), g.dup(r0, r1, r2)) < 1e-9);
      CHECK(rel(c.pp(r0, r1, r2), g.pp(r0, r1, r2)) < 1e-9);
    }
  }
  CHECK_THROWS_AS(g_closed(5), DomainError);
}

TEST_CASE("closed forms stay finite and continuous near coincidence") {
  const GFunctions c = g_closed(2), g = g_generic(2);
  for (double gap : {1e-2, 1e-5, 1e-8, 1e-12, 0.0}) {
    const double r1 = 1.3 * (1.0 + gap);
    CHECK(rel(c.dudu(1.3, r1, 0.7), g.dudu(1.3, r1, 0.7)) < 1e-9);
    CHECK(rel(c.pp(1.3, 1.3, r1), g.pp(1.3, 1.3, r1)) < 1e-9);
  }
}

TEST_CASE("two-torus functions") {
  const GFunctions g = g_generic(2);
  for (double r : {0.25, 1.0, 4.0}) {
    CHECK(rel(nct2_fdk(g, r, r), std::pow(r, -0.5) / 3.0) < 1e-12);
    CHECK(rel(nct2_fdk_stable(r, r), std::pow(r, -0.5) / 3.0) < 1e-12);
  }
  Rng rng(24);
  std::uniform_real_distribution<double> ur(0.2, 5.0);
  for (int t = 0; t < 20; ++t) {
    const double r0 = ur(rng), r1 = ur(rng), r2 = ur(rng);
    CHECK(rel(nct2_fdk_closed(r0, r1), nct2_fdk(g, r0, r1)) < 1e-10);
    CHECK(rel(nct2_fdk_stable(r0, r1), nct2_fdk(g, r0, r1)) < 1e-10);
    CHECK(rel(nct2_fg_closed(r0, r1, r2), nct2_fg(g, r0, r1, r2)) < 1e-9);
    CHECK(rel(nct2_ff_closed(r0, r1, r2), nct2_ff(g, r0, r1, r2)) < 1e-9);
  }
}

TEST_CASE("simplified conformal coefficient") {
  Rng rng(25);
  std::uniform_real_distribution<double> ur(0.2, 5.0);
  const GFunctions g = g_generic(2);
  for (int t = 0; t < 20; ++t) {
    const double r0 = ur(rng), r1 = ur(rng);
    CHECK(rel(fconf_dk_simplified(g, r0, r1), fconf_dk(g, r0, r1)) < 1e-12);
  }
}

TEST_CASE("gap sweep against the quadrature backend") {
  const GFunctions g = g_generic(2), gq = g_generic(2, quadrature_backend());
  const double r = 1.3;
  for (double gap : {1e-1, 1e-3, 1e-5, 1e-7, 1e-9}) {
    const double r1 = r * (1.0 + gap);
    CAPTURE(gap);
    CHECK(rel(g.q(r, r1), gq.q(r, r1)) < 1e-6);
    CHECK(rel(g.dp(r, r1), gq.dp(r, r1)) < 1e-6);
    CHECK(rel(g.pp(r, r1, r), gq.pp(r, r1, r)) < 1e-6);
    CHECK(rel(nct2_fdk(g, r, r1), nct2_fdk(gq, r, r1)) < 1e-6);
    CHECK(std::isfinite(nct2_fg(g, r, r1, r)));
  }
}

TEST_CASE("function registry") {
  for (SpectralName n : all_spectral_names()) {
    const SpectralFunctionId id{n, 4};
    const SpectralFunctionId back = SpectralFunctionId::parse(id.label(), 4);
    CHECK(back.name == n);
    CHECK((id.arity() == 2 || id.arity() == 3));
    std::vector<double> rs(id.arity(), 1.7);
    rs[0] = 0.9;
    std::optional<std::pair<double, double>> geo;
    if (id.needs_geometry()) geo = std::make_pair(0.3, -0.2);
    if (n == SpectralName::Q1) CHECK_THROWS_AS(spectral_fn_eval(id, rs, geo), ConfluenceError);
    else CHECK(std::isfinite(spectral_fn_eval(id, rs, geo)));
  }
  const SpectralFunctionId q2{SpectralName::Q2, 2};
  const std::vector<double> near{0.9, 1.7, 1.7 * (1 + 1e-9)};
  CHECK(rel(spectral_fn_eval(q2, near), g_generic(2).dup(0.9, 1.7, 1.7)) < 1e-6);
  CHECK(rel(spectral_fn_eval(q2, std::vector<double>{0.9, 1.7, 2.9}), Q2(0.9, 1.7, 2.9)) < 1e-14);
  CHECK_THROWS_AS(SpectralFunctionId::parse("no_such_function", 2), ValidationError);
}

TEST_CASE("geometry-dependent functions are linear in (alpha, beta)") {
  const FFunctions f = f_generic(3);
  const GeoCoeffs c = f.du(0.8, 2.1);
  const SpectralFunctionId id = SpectralFunctionId::parse("F_du", 3);
  const std::vector<double> rs{0.8, 2.1};
  CHECK(rel(spectral_fn_eval(id, rs, std::make_pair(0.4, -1.1)), c.eval(0.4, -1.1)) < 1e-13);
  CHECK_THROWS(spectral_fn_eval(id, rs));
}
