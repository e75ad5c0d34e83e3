#include "commands.hpp"

#include "heatcoeff/geometry.hpp"
#include "heatcoeff/heat_coefficients.hpp"
#include "heatcoeff/modular.hpp"
#include "heatcoeff/nct.hpp"
#include "heatcoeff/oracle.hpp"
#include "heatcoeff/universal_functions.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace heatcoeff::cli {

namespace {

struct Battery {
  json checks = json::array();
  bool passed = true;

  void add(const std::string& name, double value, double tol) {
    const bool ok = std::isfinite(value) && value <= tol;
    passed = passed && ok;
    checks.push_back({{"name", name}, {"value", value}, {"tolerance", tol}, {"pass", ok}});
  }
};

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

RMat random_metric(int d, Rng& rng) {
  std::normal_distribution<double> nd(0.0, 0.15);
  RMat g = RMat::Identity(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      const double x = nd(rng);
      g(i, j) += x;
      if (i != j) g(j, i) += x;
    }
  return g;
}

MatJet random_jet(int n, int d, int order, Rng& rng, bool positive) {
  MatJet j(positive ? random_positive(n, rng, 0.5, 3.0) : random_matrix(n, rng, 0.3), d, order);
  for (int mu = 0; mu < d && order >= 1; ++mu) j.d[mu] = positive ? random_hermitian(n, rng, 0.3) : random_matrix(n, rng, 0.3);
  for (int mu = 0; mu < d && order >= 2; ++mu)
    for (int nu = mu; nu < d; ++nu) {
      const Mat m = positive ? random_hermitian(n, rng, 0.3) : random_matrix(n, rng, 0.3);
      j.dd_at(mu, nu) = m;
      j.dd_at(nu, mu) = m;
    }
  return j;
}

void universal_checks(Battery& b, Rng& rng) {
  std::uniform_real_distribution<double> ur(0.3, 3.0);
  std::uniform_int_distribution<int> uk(0, 3), ua(2, 8);
  double worst = 0.0;
  for (int t = 0; t < 12; ++t) {
    const double alpha = 0.5 * ua(rng);
    std::vector<double> rs(uk(rng) + 1);
    for (double& r : rs) r = ur(rng);
    const SimplexArgs args(alpha, rs);
    worst = std::max(worst, rel(i_eval(args), i_quadrature(args)));
  }
  b.add("I: divided differences vs quadrature", worst, 1e-8);
  b.add("I_{1,1}(1, e) = 1/(e - 1)", rel(i_eval(1.0, {1.0, std::exp(1.0)}), 1.0 / (std::exp(1.0) - 1.0)), 1e-14);
  double cst = 0.0;
  for (int k = 0; k <= 4; ++k) {
    const std::vector<double> rs(k + 1, 1.7);
    cst = std::max(cst, rel(i_eval(2.5, rs), std::pow(1.7, -2.5) / std::tgamma(k + 1.0)));
  }
  b.add("I at equal arguments: r^-alpha / k!", cst, 1e-13);
  b.add("Bernoulli series (40 terms)", rel(i_bernoulli_series(1.9, 0.8, 40), i_one_one(1.9, 0.8)), 1e-10);
}

void spectral_checks(Battery& b, Rng& rng) {
  std::uniform_real_distribution<double> ur(0.3, 3.0);
  double worst = 0.0;
  for (int d : {2, 3, 4, 6}) {
    const GFunctions g = g_generic(d);
    for (int t = 0; t < 5; ++t) worst = std::max(worst, g_relations_residual(g, ur(rng), ur(rng), ur(rng)));
  }
  b.add("G relations and vanishing combinations", worst, 1e-10);
  const GFunctions g2 = g_generic(2);
  b.add("minimal case G_q(1,1) = 1", std::abs(g2.q(1, 1) - 1.0), 1e-13);
  b.add("minimal case G_dp(1,1) = -1/2", std::abs(g2.dp(1, 1) + 0.5), 1e-13);
  b.add("minimal case G_pp(1,1,1) = -1/4", std::abs(g2.pp(1, 1, 1) + 0.25), 1e-13);
  double conf = 0.0, sweep = 0.0;
  for (int t = 0; t < 5; ++t) {
    const double r0 = ur(rng), r1 = ur(rng);
    conf = std::max(conf, rel(fconf_dk_simplified(g2, r0, r1), fconf_dk(g2, r0, r1)));
  }
  b.add("k Delta k: simplified vs raw coefficient", conf, 1e-12);
  SpectralOptions quad;
  quad.backend = IBackend::quadrature;
  const GFunctions gq = g_generic(2, quad);
  for (double gap : {1e-1, 1e-4, 1e-7, 1e-9, 0.0})
    sweep = std::max(sweep, rel(nct2_fdk(g2, 1.3, 1.3 * (1 + gap)), nct2_fdk(gq, 1.3, 1.3 * (1 + gap))));
  b.add("F_dk near coincidence vs quadrature", sweep, 1e-6);
}

void density_checks(Battery& b, Rng& rng) {
  double cross = 0.0, gauge = 0.0, curv = 0.0;
  for (int d : {2, 4}) {
    const MetricJet g = MetricJet::from_arrays(random_metric(d, rng), std::vector<RMat>(d, 0.1 * RMat::Identity(d, d)),
                                               std::vector<RMat>(static_cast<size_t>(d) * d, RMat::Zero(d, d)));
    PointFieldsUVW f;
    f.u = random_jet(2, d, 2, rng, true);
    for (int mu = 0; mu < d; ++mu) f.v.push_back(random_jet(2, d, 1, rng, false));
    f.w = random_jet(2, d, 0, rng, false);
    const std::vector<MatJet> A(d, MatJet(Mat::Zero(2, 2), d, 1));
    const MetricData md = metric_data(g);
    const PointFieldsUPQ c = uvw_to_upq(md, g, f, A);
    const Mat a = r2_local_uvw(g, f, f_generic(d));
    const Mat cov = r2_local_upq(g, c, g_generic(d));
    cross = std::max({cross, rel_diff(a, cov), rel_diff(cov, r2_corollary(*corollary_branch_for(d), g, c))});
    std::vector<MatJet> phi;
    for (int mu = 0; mu < d; ++mu) {
      MatJet p(random_antihermitian(2, rng, 0.3), d, 1);
      for (int nu = 0; nu < d; ++nu) p.d[nu] = random_antihermitian(2, rng, 0.3);
      phi.push_back(p);
    }
    gauge = std::max(gauge, rel_diff(cov, r2_local_upq(g, gauge_shift(md, g, c, phi), g_generic(d))));
    curv = std::max(curv, std::abs(alpha_combination(g) - scalar_curvature(g) / 6.0));
  }
  b.add("coordinate = covariant = corollary (d = 2, 4)", cross, 1e-9);
  b.add("gauge invariance", gauge, 1e-9);
  b.add("alpha combination = R/6", curv, 1e-10);
}

void nct_checks(Battery& b, Rng& rng) {
  const std::vector<Rational> th{{1, 3}};
  std::normal_distribution<double> nd;
  NctElement x(1, th), y(1, th);
  for (int i = -1; i <= 1; ++i)
    for (int j = -1; j <= 1; ++j) {
      x.add({i, j}, cplx(nd(rng), nd(rng)));
      y.add({i, j}, cplx(nd(rng), nd(rng)));
    }
  const std::vector<double> pt{0.4, 1.9};
  NctRealizer re(x);
  b.add("NCT realisation is multiplicative", max_abs(re(x * y, pt) - re(x, pt) * re(y, pt)), 1e-12);
  b.add("NCT realisation respects adjoints", max_abs(re(adjoint(x), pt) - re(x, pt).adjoint()), 1e-12);
  const cplx tau(0.3, 1.1);
  const std::vector<RMat> g{tau_metric(tau)};
  b.add("trace correspondence", std::abs(phi_correspondence(x, g) - phi_expected(x, g)), 1e-10);
  NctElement h(1, {{1, 2}});
  h.add({1, 0}, 0.1);
  h.add({-1, 0}, 0.1);
  const NctElement k = nct_function(h, [](double v) { return std::exp(0.5 * v); }, 6, 16);
  NctCurvatureOptions opt;
  opt.radius = 6;
  opt.points = 16;
  b.add("two-torus density vs closed form", nct2_curvature(k, tau, opt).closed_form_residual, 1e-10);
}

void oracle_checks(Battery& b) {
  FourierOperator op;
  op.g_inv = RMat::Identity(2, 2);
  op.u = FourierField::constant(2, identity(1));
  op.v = {FourierField(2, 1), FourierField(2, 1)};
  op.w = FourierField(2, 1);
  OracleOptions o;
  o.cutoff = 8;
  o.transverse_radius = 8;
  const AssembledOperator a = assemble(op, o, 0.05);
  const double trace = heat_trace(heat_trace_data(a), 0.05).real();
  double s = 0.0;
  for (int k = -8; k <= 8; ++k) s += std::exp(-0.05 * k * k);
  b.add("flat Laplacian heat trace vs lattice sum", rel(trace, s * s), 1e-12);
}

void modular_checks(Battery& b, Rng& rng) {
  double worst = 0.0;
  const Mat u = random_positive(3, rng);
  const std::vector<Mat> bs{random_matrix(3, rng), random_matrix(3, rng)};
  const auto [lhs, rhs] = rearrange([](std::span<const double> r) { return i_one_one(r[0], r[1]); }, u, bs);
  worst = max_abs(lhs - rhs);
  b.add("rearrangement identity", worst, 1e-12);
  b.add("G_(Delta ln k) independent of r0", std::abs(g_delta_ln_k(0.1, 1.7) - g_delta_ln_k(10.0, 1.7)), 1e-11);
}

}  // namespace

CommandOutput cmd_selftest(unsigned long long seed) {
  Rng rng(seed);
  Battery b;
  universal_checks(b, rng);
  spectral_checks(b, rng);
  density_checks(b, rng);
  nct_checks(b, rng);
  modular_checks(b, rng);
  oracle_checks(b);
  CommandOutput out;
  out.doc = {{"command", "selftest"}, {"seed", seed}, {"passed", b.passed}, {"checks", b.checks}};
  std::ostringstream os;
  os << "name,value,tolerance,pass\n";
  for (const auto& c : b.checks)
    os << '"' << c.at("name").get<std::string>() << "\"," << csv_number(c.at("value").get<double>()) << ','
       << csv_number(c.at("tolerance").get<double>()) << ',' << (c.at("pass").get<bool>() ? "true" : "false") << '\n';
  out.csv = os.str();
  return out;
}

}  // namespace heatcoeff::cli
