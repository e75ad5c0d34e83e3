#include "heatcoeff/geometry.hpp"

#include "heatcoeff/errors.hpp"

#include <Eigen/Eigenvalues>

namespace heatcoeff {

MetricJet MetricJet::constant(const RMat& g_inv) {
  MetricJet j;
  j.dim = static_cast<int>(g_inv.rows());
  j.ginv.resize(static_cast<size_t>(j.dim) * j.dim);
  for (int a = 0; a < j.dim; ++a)
    for (int b = 0; b < j.dim; ++b) j.ginv[static_cast<size_t>(a) * j.dim + b] = RJet(g_inv(a, b), j.dim, 2);
  j.validate();
  return j;
}

MetricJet MetricJet::from_arrays(const RMat& g_inv, const std::vector<RMat>& dg, const std::vector<RMat>& ddg) {
  MetricJet j = constant(g_inv);
  const int d = j.dim;
  if (static_cast<int>(dg.size()) != d || static_cast<int>(ddg.size()) != d * d)
    throw ValidationError("MetricJet: derivative arrays have the wrong shape");
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      RJet& e = j.ginv[static_cast<size_t>(a) * d + b];
      for (int r = 0; r < d; ++r) e.d[r] = dg[r](a, b);
      for (int r = 0; r < d * d; ++r) e.dd[r] = ddg[r](a, b);
    }
  j.validate();
  return j;
}

RMat MetricJet::g_inv() const {
  RMat g(dim, dim);
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b) g(a, b) = up(a, b).v;
  return g;
}

RMat MetricJet::g_lower() const { return g_inv().inverse(); }

void MetricJet::validate() const {
  if (dim < 1 || ginv.size() != static_cast<size_t>(dim) * dim)
    throw ValidationError("MetricJet: inconsistent dimension");
  const RMat g = g_inv();
  if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + g.cwiseAbs().maxCoeff()))
    throw DomainError("MetricJet: g^{mu nu} is not symmetric");
  Eigen::SelfAdjointEigenSolver<RMat> es(g);
  if (es.eigenvalues().minCoeff() <= 0.0) throw DomainError("MetricJet: g^{mu nu} is not positive definite");
}

// ----------------------------------------------------------------------------

MetricData metric_data(const MetricJet& jet) {
  jet.validate();
  const int d = jet.dim;
  MetricData m;
  m.dim = d;
  m.glo = inverse_entries(jet.ginv, d);
  auto lo = [&](int a, int b) -> const RJet& { return m.glo[static_cast<size_t>(a) * d + b]; };

  m.alpha_lo.resize(d);
  m.alpha_up.resize(d);
  m.beta_lo.resize(d);
  m.beta_up.resize(d);
  m.gamma_trace.resize(d);
  for (int mu = 0; mu < d; ++mu) {
    RJet a(0.0, d, 1), b(0.0, d, 1);
    for (int r = 0; r < d; ++r)
      for (int s = 0; s < d; ++s) a = a + lo(r, s) * partial(jet.up(r, s), mu);
    for (int nu = 0; nu < d; ++nu) b = b + partial(jet.up(mu, nu), nu);
    m.alpha_lo[mu] = a;
    m.beta_up[mu] = b;
  }
  for (int mu = 0; mu < d; ++mu) {
    RJet a(0.0, d, 1), b(0.0, d, 1);
    for (int nu = 0; nu < d; ++nu) {
      a = a + jet.up(mu, nu) * m.alpha_lo[nu];
      b = b + lo(mu, nu) * m.beta_up[nu];
    }
    m.alpha_up[mu] = a;
    m.beta_lo[mu] = b;
    m.gamma_trace[mu] = scaled(m.alpha_up[mu], 0.5) - m.beta_up[mu];
  }

  // Gamma^nu_{mu rho} = g^{nu l} (d_mu g_{l rho} + d_rho g_{l mu} - d_l g_{mu rho}) / 2
  m.gamma.assign(static_cast<size_t>(d) * d * d, RJet(0.0, d, 1));
  for (int nu = 0; nu < d; ++nu)
    for (int mu = 0; mu < d; ++mu)
      for (int rho = 0; rho < d; ++rho) {
        RJet s(0.0, d, 1);
        for (int l = 0; l < d; ++l) {
          RJet c = partial(lo(l, rho), mu) + partial(lo(l, mu), rho) - partial(lo(mu, rho), l);
          s = s + jet.up(nu, l) * c;
        }
        m.gamma[(static_cast<size_t>(nu) * d + mu) * d + rho] = scaled(s, 0.5);
      }

  // Ricci R_{sigma nu} = R^rho_{sigma rho nu}
  double R = 0.0;
  for (int sg = 0; sg < d; ++sg)
    for (int nu = 0; nu < d; ++nu) {
      double ric = 0.0;
      for (int rho = 0; rho < d; ++rho) {
        ric += m.Gamma(rho, nu, sg).d[rho] - m.Gamma(rho, rho, sg).d[nu];
        for (int l = 0; l < d; ++l)
          ric += m.Gamma(rho, rho, l).v * m.Gamma(l, nu, sg).v - m.Gamma(rho, nu, l).v * m.Gamma(l, rho, sg).v;
      }
      R += jet.up(sg, nu).v * ric;
    }
  m.scalar_curvature = R;
  return m;
}

std::vector<double> christoffel(const MetricJet& jet) {
  const MetricData m = metric_data(jet);
  std::vector<double> out(m.gamma.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = m.gamma[i].v;
  return out;
}

AlphaBeta alpha_beta(const MetricJet& jet) {
  const MetricData m = metric_data(jet);
  AlphaBeta ab;
  ab.alpha_lo.resize(m.dim);
  ab.alpha_up.resize(m.dim);
  ab.beta_lo.resize(m.dim);
  ab.beta_up.resize(m.dim);
  for (int i = 0; i < m.dim; ++i) {
    ab.alpha_lo(i) = m.alpha_lo[i].v;
    ab.alpha_up(i) = m.alpha_up[i].v;
    ab.beta_lo(i) = m.beta_lo[i].v;
    ab.beta_up(i) = m.beta_up[i].v;
  }
  return ab;
}

double scalar_curvature(const MetricJet& jet) { return metric_data(jet).scalar_curvature; }

double alpha_coefficient(const MetricJet& jet) {
  jet.validate();
  const int d = jet.dim;
  const RMat G = jet.g_inv();
  const RMat g = G.inverse();
  auto D = [&](int mu, int a, int b) { return jet.up(a, b).d[mu]; };
  auto DD = [&](int mu, int nu, int a, int b) { return jet.up(a, b).dd_at(mu, nu); };

  double t1 = 0, t2 = 0, t3 = 0, t4 = 0, t5 = 0, t6 = 0, t7 = 0;
  for (int mu = 0; mu < d; ++mu)
    for (int nu = 0; nu < d; ++nu) {
      t1 += DD(mu, nu, mu, nu);
      for (int r = 0; r < d; ++r)
        for (int s = 0; s < d; ++s) {
          t2 += G(mu, nu) * g(r, s) * DD(mu, nu, r, s);
          t5 += g(r, s) * D(mu, mu, nu) * D(nu, r, s);
          t6 += g(r, s) * D(mu, nu, r) * D(nu, mu, s);
          t7 += g(r, s) * D(mu, mu, r) * D(nu, nu, s);
          for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) {
              t3 += G(mu, nu) * g(r, s) * g(a, b) * D(mu, r, s) * D(nu, a, b);
              t4 += G(mu, nu) * g(r, s) * g(a, b) * D(mu, r, a) * D(nu, s, b);
            }
        }
    }
  return t1 / 3.0 - t2 / 12.0 + t3 / 48.0 + t4 / 24.0 - t5 / 12.0 + t6 / 12.0 - t7 / 4.0;
}

double alpha_combination(const MetricJet& jet) {
  const MetricData m = metric_data(jet);
  double s = alpha_coefficient(jet);
  for (int mu = 0; mu < m.dim; ++mu) {
    const double al = m.alpha_lo[mu].v, au = m.alpha_up[mu].v;
    const double bl = m.beta_lo[mu].v, bu = m.beta_up[mu].v;
    s += -0.25 * au * bl + 0.5 * bu * bl + 0.25 * m.alpha_up[mu].d[mu] - 0.5 * m.beta_up[mu].d[mu] -
         al * au / 16.0 + 0.25 * al * bu - 0.25 * bl * bu;
  }
  return s;
}

// ----------------------------------------------------------------------------

namespace {

int fiber(const MatJet& u) { return static_cast<int>(u.v.rows()); }

MatJet sum_g_contract(const MetricJet& g, int nu, const std::vector<MatJet>& X, int order) {
  // g^{mu nu} X_mu
  const int d = g.dim;
  MatJet s(Mat::Zero(X[0].v.rows(), X[0].v.cols()), d, order);
  for (int mu = 0; mu < d; ++mu) s = s + g.up(mu, nu) * X[mu];
  return s;
}

}  // namespace

std::vector<MatJet> covariant_du(const PointFieldsUPQ& f) {
  const int d = f.u.dim;
  std::vector<MatJet> out(d);
  for (int mu = 0; mu < d; ++mu) out[mu] = partial(f.u, mu) + commutator(f.A[mu], f.u);
  return out;
}

PointFieldsUPQ uvw_to_upq(const MetricData& m, const MetricJet& g, const PointFieldsUVW& f,
                          const std::vector<MatJet>& A) {
  const int d = g.dim;
  const int N = fiber(f.u);
  if (static_cast<int>(f.v.size()) != d || static_cast<int>(A.size()) != d)
    throw ValidationError("uvw_to_upq: field arity does not match the dimension");
  PointFieldsUPQ r;
  r.u = f.u;
  r.A = A;
  std::vector<MatJet> X(d), cdu(d);
  for (int mu = 0; mu < d; ++mu) cdu[mu] = partial(f.u, mu) + commutator(A[mu], f.u);
  for (int nu = 0; nu < d; ++nu) {
    X[nu] = f.v[nu] - scaled(f.u * sum_g_contract(g, nu, A, 1), 2.0);
    r.p.push_back(X[nu] - sum_g_contract(g, nu, cdu, 1) + m.gamma_trace[nu] * f.u);
  }
  MatJet q = f.w.truncated(0);
  for (int mu = 0; mu < d; ++mu)
    for (int nu = 0; nu < d; ++nu) {
      const MatJet inner = partial(A[nu], mu) + A[mu] * A[nu];
      q = q - g.up(mu, nu).truncated(0) * (f.u * inner);
    }
  for (int nu = 0; nu < d; ++nu) q = q - X[nu] * A[nu];
  r.q = q.truncated(0);
  (void)N;
  return r;
}

PointFieldsUVW upq_to_uvw(const MetricData& m, const MetricJet& g, const PointFieldsUPQ& f) {
  const int d = g.dim;
  PointFieldsUVW r;
  r.u = f.u;
  const std::vector<MatJet> cdu = covariant_du(f);
  std::vector<MatJet> X(d);
  for (int nu = 0; nu < d; ++nu) {
    X[nu] = f.p[nu] + sum_g_contract(g, nu, cdu, 1) - m.gamma_trace[nu] * f.u;
    r.v.push_back(X[nu] + scaled(f.u * sum_g_contract(g, nu, f.A, 1), 2.0));
  }
  MatJet w = f.q.truncated(0);
  for (int mu = 0; mu < d; ++mu)
    for (int nu = 0; nu < d; ++nu) {
      const MatJet inner = partial(f.A[nu], mu) + f.A[mu] * f.A[nu];
      w = w + g.up(mu, nu).truncated(0) * (f.u * inner);
    }
  for (int nu = 0; nu < d; ++nu) w = w + X[nu] * f.A[nu];
  r.w = w.truncated(0);
  return r;
}

CovariantDerivatives covariant_derivatives(const MetricData& m, const PointFieldsUPQ& f) {
  const int d = m.dim;
  const int N = fiber(f.u);
  CovariantDerivatives c;
  const std::vector<MatJet> cdu = covariant_du(f);
  for (int mu = 0; mu < d; ++mu) c.du.push_back(cdu[mu].v);
  c.ddu.resize(static_cast<size_t>(d) * d);
  for (int mu = 0; mu < d; ++mu)
    for (int nu = 0; nu < d; ++nu) {
      Mat x = cdu[nu].d[mu] + commutator(f.A[mu].v, cdu[nu].v);
      for (int rho = 0; rho < d; ++rho) x -= m.Gamma(rho, mu, nu).v * cdu[rho].v;
      c.ddu[static_cast<size_t>(mu) * d + nu] = x;
    }
  c.div_p = Mat::Zero(N, N);
  for (int mu = 0; mu < d; ++mu) {
    c.div_p += f.p[mu].d[mu] + commutator(f.A[mu].v, f.p[mu].v);
    for (int rho = 0; rho < d; ++rho) c.div_p += m.Gamma(mu, mu, rho).v * f.p[rho].v;
  }
  return c;
}

PointFieldsUPQ gauge_shift(const MetricData& m, const MetricJet& g, const PointFieldsUPQ& f,
                           const std::vector<MatJet>& phi) {
  const int d = g.dim;
  if (static_cast<int>(phi.size()) != d) throw ValidationError("gauge_shift: phi has the wrong arity");
  PointFieldsUPQ r = f;
  for (int mu = 0; mu < d; ++mu) r.A[mu] = f.A[mu] + phi[mu];
  for (int nu = 0; nu < d; ++nu) {
    std::vector<MatJet> s(d);
    for (int mu = 0; mu < d; ++mu) s[mu] = f.u * phi[mu] + phi[mu] * f.u;
    r.p[nu] = f.p[nu] - sum_g_contract(g, nu, s, 1);
  }
  const std::vector<MatJet> cdu = covariant_du(f);
  Mat q = f.q.v;
  for (int mu = 0; mu < d; ++mu)
    for (int nu = 0; nu < d; ++nu) {
      const double gmn = g.up(mu, nu).v;
      if (gmn == 0.0) continue;
      Mat dphi = phi[nu].d[mu] + commutator(f.A[mu].v, phi[nu].v);
      for (int rho = 0; rho < d; ++rho) dphi -= m.Gamma(rho, mu, nu).v * phi[rho].v;
      const Mat nabla_uphi = cdu[mu].v * phi[nu].v + f.u.v * dphi;
      q += gmn * (-nabla_uphi + f.u.v * phi[mu].v * phi[nu].v);
    }
  for (int mu = 0; mu < d; ++mu) q -= f.p[mu].v * phi[mu].v;
  r.q = MatJet(q, d, 0);
  return r;
}

Mat solve_sylvester(const Mat& u, const Mat& p) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(u));
  const RVec& ev = es.eigenvalues();
  if (ev.minCoeff() <= 0.0) throw DomainError("solve_sylvester: u is not positive definite");
  const Mat& V = es.eigenvectors();
  Mat pt = V.adjoint() * p * V;
  for (int a = 0; a < pt.rows(); ++a)
    for (int b = 0; b < pt.cols(); ++b) pt(a, b) /= (ev(a) + ev(b));
  return V * pt * V.adjoint();
}

std::vector<Mat> solve_phi_p_zero(const Mat& u, const std::vector<Mat>& p, const RMat& g_inv) {
  const int d = static_cast<int>(p.size());
  const RMat glo = g_inv.inverse();
  std::vector<Mat> X(d), phi(d);
  for (int nu = 0; nu < d; ++nu) X[nu] = solve_sylvester(u, p[nu]);
  for (int mu = 0; mu < d; ++mu) {
    phi[mu] = Mat::Zero(u.rows(), u.cols());
    for (int nu = 0; nu < d; ++nu) phi[mu] += glo(mu, nu) * X[nu];
  }
  return phi;
}

std::vector<MatJet> solve_phi_p_zero(const PointFieldsUPQ& f, const MetricJet& g) {
  const int d = g.dim;
  const std::vector<RJet> glo = inverse_entries(g.ginv, d);
  std::vector<MatJet> X(d);
  for (int nu = 0; nu < d; ++nu) {
    MatJet x(solve_sylvester(f.u.v, f.p[nu].v), d, 1);
    for (int mu = 0; mu < d; ++mu) {
      const Mat rhs = f.p[nu].d[mu] - f.u.d[mu] * x.v - x.v * f.u.d[mu];
      x.d[mu] = solve_sylvester(f.u.v, rhs);
    }
    X[nu] = x;
  }
  std::vector<MatJet> phi(d);
  for (int mu = 0; mu < d; ++mu) {
    MatJet s(Mat::Zero(f.u.v.rows(), f.u.v.cols()), d, 1);
    for (int nu = 0; nu < d; ++nu) s = s + glo[static_cast<size_t>(mu) * d + nu] * X[nu];
    phi[mu] = s;
  }
  return phi;
}

}  // namespace heatcoeff
