#include "heatcoeff/heat_coefficients.hpp"

#include "heatcoeff/errors.hpp"

#include <boost/math/constants/constants.hpp>

#include <cmath>
#include <numeric>
#include <sstream>

namespace heatcoeff {

namespace {

constexpr double pi = boost::math::constants::pi<double>();

// Tables and rotated factors for one decomposition of u.
class Assembler {
 public:
  Assembler(const Mat& u, double cluster_tol) : dec_(spectral_decompose(u, cluster_tol)) {}

  const SpectralDecomposition& dec() const { return dec_; }
  Mat in(const Mat& b) const { return dec_.rotate_in(b); }

  SpectralTable table(const Fn2& f) const {
    return tabulate([&](std::span<const double> r) { return f(r[0], r[1]); }, 1, dec_);
  }
  SpectralTable table(const Fn3& f) const {
    return tabulate([&](std::span<const double> r) { return f(r[0], r[1], r[2]); }, 2, dec_);
  }
  SpectralTable power_table(double e) const {
    return tabulate([&](std::span<const double> r) { return std::pow(r[0], e); }, 0, dec_);
  }

  // The arguments are already rotated.
  Mat one(const SpectralTable& t, const Mat& b) const {
    const Mat bs[1] = {b};
    return apply_rotated(t, dec_, bs);
  }
  Mat two(const SpectralTable& t, const Mat& b1, const Mat& b2) const {
    const Mat bs[2] = {b1, b2};
    return apply_rotated(t, dec_, bs);
  }
  Mat diag(const SpectralTable& t) const { return apply_rotated(t, dec_, std::span<const Mat>{}); }
  Mat out(const Mat& m) const { return dec_.rotate_out(m); }

 private:
  SpectralDecomposition dec_;
};

void check_dims(const MetricJet& g, int fields_dim, const char* where) {
  if (g.dim != fields_dim) {
    std::ostringstream os;
    os << where << ": metric dimension " << g.dim << " does not match field dimension " << fields_dim;
    throw ValidationError(os.str());
  }
}

std::vector<Mat> lowered(const RMat& glo, const std::vector<Mat>& up) {
  const int d = static_cast<int>(up.size());
  std::vector<Mat> lo(d);
  for (int mu = 0; mu < d; ++mu) {
    lo[mu] = Mat::Zero(up[0].rows(), up[0].cols());
    for (int nu = 0; nu < d; ++nu) lo[mu] += glo(mu, nu) * up[nu];
  }
  return lo;
}

}  // namespace

double r2_prefactor(int d) { return 1.0 / (std::pow(2.0, d) * std::pow(pi, 0.5 * d)); }

Mat r2_local_uvw(const MetricJet& g, const PointFieldsUVW& f, const FFunctions& F, const LocalOptions& opt) {
  const int d = g.dim;
  check_dims(g, static_cast<int>(f.v.size()), "r2_local_uvw");
  if (F.d != d) throw ValidationError("r2_local_uvw: spectral functions built for another dimension");
  if (f.u.order < 2 || f.v.empty() || f.v[0].order < 1)
    throw ValidationError("r2_local_uvw: u needs second and v first derivatives");
  const RMat G = g.g_inv();
  const RMat glo = G.inverse();
  const AlphaBeta ab = alpha_beta(g);
  const double alpha = alpha_coefficient(g);

  const Assembler as(f.u.v, opt.cluster_tol);
  std::vector<Mat> du(d), v(d);
  for (int mu = 0; mu < d; ++mu) {
    du[mu] = as.in(f.u.d[mu]);
    v[mu] = as.in(f.v[mu].v);
  }
  const std::vector<Mat> vlo = lowered(glo, v);
  const int N = static_cast<int>(f.u.v.rows());
  Mat ddu = Mat::Zero(N, N), dv = Mat::Zero(N, N);
  Mat du_alpha = ddu, du_beta = ddu, v_alpha = ddu, v_beta = ddu;
  for (int mu = 0; mu < d; ++mu) {
    dv += f.v[mu].d[mu];
    du_alpha += ab.alpha_up(mu) * du[mu];
    du_beta += ab.beta_up(mu) * du[mu];
    v_alpha += ab.alpha_lo(mu) * v[mu];
    v_beta += ab.beta_lo(mu) * v[mu];
    for (int nu = 0; nu < d; ++nu) ddu += G(mu, nu) * f.u.dd_at(mu, nu);
  }

  auto geo_table = [&](const Geo2& fn, bool alpha_part) {
    return as.table(Fn2([&fn, alpha_part](double r0, double r1) {
      const GeoCoeffs c = fn(r0, r1);
      return alpha_part ? c.alpha : c.beta;
    }));
  };

  Mat acc = alpha * as.diag(as.power_table(1.0 - 0.5 * d));
  acc += as.one(as.table(F.w), as.in(f.w.v));
  acc += as.one(as.table(F.ddu), as.in(ddu));
  acc += as.one(as.table(F.dv), as.in(dv));
  acc += as.one(geo_table(F.du, true), du_alpha) + as.one(geo_table(F.du, false), du_beta);
  acc += as.one(geo_table(F.v, true), v_alpha) + as.one(geo_table(F.v, false), v_beta);

  const SpectralTable t_dudu = as.table(F.dudu), t_vv = as.table(F.vv);
  const SpectralTable t_vdu = as.table(F.vdu), t_duv = as.table(F.duv);
  for (int mu = 0; mu < d; ++mu) {
    acc += as.two(t_vdu, v[mu], du[mu]) + as.two(t_duv, du[mu], v[mu]);
    acc += as.two(t_vv, v[mu], vlo[mu]);
    for (int nu = 0; nu < d; ++nu)
      if (G(mu, nu) != 0.0) acc += G(mu, nu) * as.two(t_dudu, du[mu], du[nu]);
  }
  return r2_prefactor(d) * as.out(acc);
}

Mat r2_local_upq(const MetricJet& g, const PointFieldsUPQ& f, const GFunctions& Gf, const LocalOptions& opt) {
  const int d = g.dim;
  check_dims(g, static_cast<int>(f.p.size()), "r2_local_upq");
  if (Gf.d != d) throw ValidationError("r2_local_upq: spectral functions built for another dimension");
  const MetricData md = metric_data(g);
  const CovariantDerivatives cd = covariant_derivatives(md, f);
  const RMat G = g.g_inv();
  const RMat glo = G.inverse();

  const Assembler as(f.u.v, opt.cluster_tol);
  const int N = static_cast<int>(f.u.v.rows());
  std::vector<Mat> du(d), p(d);
  Mat ddu = Mat::Zero(N, N);
  for (int mu = 0; mu < d; ++mu) {
    du[mu] = as.in(cd.du[mu]);
    p[mu] = as.in(f.p[mu].v);
    for (int nu = 0; nu < d; ++nu) ddu += G(mu, nu) * cd.ddu[static_cast<size_t>(mu) * d + nu];
  }
  const std::vector<Mat> plo = lowered(glo, p);

  Mat acc = (md.scalar_curvature / 6.0) * as.diag(as.power_table(1.0 - 0.5 * d));
  acc += as.one(as.table(Gf.q), as.in(f.q.v));
  acc += as.one(as.table(Gf.ddu), as.in(ddu));
  acc += as.one(as.table(Gf.dp), as.in(cd.div_p));
  const SpectralTable t_dudu = as.table(Gf.dudu), t_pdu = as.table(Gf.pdu);
  const SpectralTable t_dup = as.table(Gf.dup), t_pp = as.table(Gf.pp);
  for (int mu = 0; mu < d; ++mu) {
    acc += as.two(t_pdu, p[mu], du[mu]) + as.two(t_dup, du[mu], p[mu]);
    acc += as.two(t_pp, p[mu], plo[mu]);
    for (int nu = 0; nu < d; ++nu)
      if (G(mu, nu) != 0.0) acc += G(mu, nu) * as.two(t_dudu, du[mu], du[nu]);
  }
  return r2_prefactor(d) * as.out(acc);
}

std::string to_string(CorollaryBranch b) {
  switch (b) {
    case CorollaryBranch::d2: return "d2";
    case CorollaryBranch::d3: return "d3";
    case CorollaryBranch::d4: return "d4";
    case CorollaryBranch::even: return "even";
  }
  return "?";
}

std::optional<CorollaryBranch> corollary_branch_for(int d) {
  if (d == 2) return CorollaryBranch::d2;
  if (d == 3) return CorollaryBranch::d3;
  if (d == 4) return CorollaryBranch::d4;
  if (d >= 6 && d % 2 == 0) return CorollaryBranch::even;
  return std::nullopt;
}

Mat r2_corollary(CorollaryBranch branch, const MetricJet& g, const PointFieldsUPQ& f, const LocalOptions& opt,
                 const SpectralOptions& sopt) {
  const int d = g.dim;
  const bool fits = (branch == CorollaryBranch::d2 && d == 2) || (branch == CorollaryBranch::d3 && d == 3) ||
                    (branch == CorollaryBranch::d4 && d == 4) ||
                    (branch == CorollaryBranch::even && d >= 2 && d % 2 == 0);
  if (!fits) {
    std::ostringstream os;
    os << "r2_corollary: branch " << to_string(branch) << " does not apply in dimension " << d;
    throw DomainError(os.str());
  }
  switch (branch) {
    case CorollaryBranch::d2: return r2_local_upq(g, f, g_closed(2, sopt), opt);
    case CorollaryBranch::d3: return r2_local_upq(g, f, g_closed_d3(), opt);
    case CorollaryBranch::even: return r2_local_upq(g, f, g_closed_even(d / 2), opt);
    case CorollaryBranch::d4: break;
  }

  // d = 4: only inverses of u appear
  check_dims(g, static_cast<int>(f.p.size()), "r2_corollary");
  const MetricData md = metric_data(g);
  const CovariantDerivatives cd = covariant_derivatives(md, f);
  const RMat G = g.g_inv();
  const RMat glo = G.inverse();
  spectral_decompose(f.u.v, opt.cluster_tol);  // positivity check
  const Mat ui = f.u.v.inverse();
  const int N = static_cast<int>(ui.rows());
  std::vector<Mat> p(4);
  for (int mu = 0; mu < 4; ++mu) p[mu] = f.p[mu].v;
  const std::vector<Mat> plo = lowered(glo, p);

  Mat second = cd.div_p;
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu) second += G(mu, nu) * cd.ddu[static_cast<size_t>(mu) * 4 + nu];
  Mat acc = (md.scalar_curvature / 6.0) * ui + ui * f.q.v * ui - 0.5 * ui * second * ui;
  Mat quad = Mat::Zero(N, N);
  for (int mu = 0; mu < 4; ++mu) {
    Mat right = Mat::Zero(N, N);
    for (int nu = 0; nu < 4; ++nu) right += G(mu, nu) * cd.du[nu];
    // g^{mu nu} (nabla_mu u - p_mu) u^{-1} (nabla_nu u + p_nu)
    quad += cd.du[mu] * ui * (right + p[mu]) - plo[mu] * ui * right - p[mu] * ui * plo[mu];
  }
  acc += 0.25 * ui * quad * ui;
  return r2_prefactor(4) * acc;
}

Mat r2_minimal(const MetricJet& g, const PointFieldsUPQ& f) {
  const int d = g.dim;
  check_dims(g, static_cast<int>(f.p.size()), "r2_minimal");
  const int N = static_cast<int>(f.u.v.rows());
  if (max_abs(f.u.v - identity(N)) > 1e-14) throw ValidationError("r2_minimal: u must be the identity");
  const MetricData md = metric_data(g);
  const CovariantDerivatives cd = covariant_derivatives(md, f);
  const RMat glo = g.g_lower();
  Mat acc = (md.scalar_curvature / 6.0) * identity(N) + f.q.v - 0.5 * cd.div_p;
  for (int mu = 0; mu < d; ++mu)
    for (int nu = 0; nu < d; ++nu) acc -= 0.25 * glo(mu, nu) * f.p[mu].v * f.p[nu].v;
  return r2_prefactor(d) * acc;
}

Mat r2_minimal_reduced(const MetricJet& g, const Mat& q_prime) {
  const int N = static_cast<int>(q_prime.rows());
  return r2_prefactor(g.dim) * ((scalar_curvature(g) / 6.0) * identity(N) + q_prime);
}

namespace {

// nabla_mu k and g^{mu nu} nabla_mu nabla_nu k through the u-slot of the covariant helpers.
struct KDerivatives {
  std::vector<MatJet> dk;  // order 1
  Mat box;                 // g^{mu nu} nabla_mu nabla_nu k
};

KDerivatives k_derivatives(const MetricJet& g, const MetricData& md, const MatJet& k, const std::vector<MatJet>& A) {
  const int d = g.dim;
  const int N = static_cast<int>(k.v.rows());
  if (k.order < 2) throw ValidationError("conformal-like: k needs second derivatives");
  if (static_cast<int>(A.size()) != d) throw ValidationError("conformal-like: connection has the wrong arity");
  PointFieldsUPQ kf;
  kf.u = k;
  kf.q = MatJet(Mat::Zero(N, N), d, 0);
  kf.p.assign(d, MatJet(Mat::Zero(N, N), d, 1));
  kf.A = A;
  const CovariantDerivatives cd = covariant_derivatives(md, kf);
  KDerivatives out;
  out.dk = covariant_du(kf);
  out.box = Mat::Zero(N, N);
  for (int mu = 0; mu < d; ++mu)
    for (int nu = 0; nu < d; ++nu) out.box += g.up(mu, nu).v * cd.ddu[static_cast<size_t>(mu) * d + nu];
  return out;
}

}  // namespace

PointFieldsUPQ conformal_like_fields(const MetricJet& g, const MatJet& k, const std::vector<MatJet>& A) {
  const int d = g.dim;
  const MetricData md = metric_data(g);
  const KDerivatives kd = k_derivatives(g, md, k, A);
  PointFieldsUPQ f;
  f.u = k * k;
  f.A = A;
  for (int nu = 0; nu < d; ++nu) {
    MatJet s;
    bool first = true;
    for (int mu = 0; mu < d; ++mu) {
      const MatJet term = to_matrix_jet(g.up(mu, nu).truncated(1), static_cast<int>(k.v.rows())) *
                          (k.truncated(1) * kd.dk[mu] - kd.dk[mu] * k.truncated(1));
      s = first ? term : s + term;
      first = false;
    }
    f.p.push_back(s);
  }
  // q = -k (Delta k) = k (g nabla nabla k)
  f.q = MatJet(k.v * kd.box, d, 0);
  return f;
}

Mat r2_conformal_like(const MetricJet& g, const MatJet& k, const std::vector<MatJet>& A, const GFunctions& Gf,
                      const LocalOptions& opt) {
  const int d = g.dim;
  if (Gf.d != d) throw ValidationError("r2_conformal_like: spectral functions built for another dimension");
  const MetricData md = metric_data(g);
  const KDerivatives kd = k_derivatives(g, md, k, A);
  const RMat G = g.g_inv();
  const Assembler as(k.v * k.v, opt.cluster_tol);
  std::vector<Mat> dk(d);
  for (int mu = 0; mu < d; ++mu) dk[mu] = as.in(kd.dk[mu].v);

  const GFunctions gg = Gf;
  const Fn2 f_dk = [gg](double r0, double r1) { return fconf_dk(gg, r0, r1); };
  const Fn3 f_dkdk = [gg](double r0, double r1, double r2) { return fconf_dkdk(gg, r0, r1, r2); };
  Mat acc = (md.scalar_curvature / 6.0) * as.diag(as.power_table(1.0 - 0.5 * d));
  acc += as.one(as.table(f_dk), as.in(Mat(-kd.box)));
  const SpectralTable t = as.table(f_dkdk);
  for (int mu = 0; mu < d; ++mu)
    for (int nu = 0; nu < d; ++nu)
      if (G(mu, nu) != 0.0) acc += G(mu, nu) * as.two(t, dk[mu], dk[nu]);
  return r2_prefactor(d) * as.out(acc);
}

cplx trace_r2_collapsed(const MetricJet& g, const PointFieldsUVW& f, const LocalOptions& opt) {
  const int d = g.dim;
  if (d % 2 != 0) throw DomainError("trace_r2_collapsed: even dimension required");
  check_dims(g, static_cast<int>(f.v.size()), "trace_r2_collapsed");
  const int m = d / 2;
  const RMat G = g.g_inv();
  const RMat glo = G.inverse();
  const AlphaBeta ab = alpha_beta(g);
  const SpectralDecomposition dec = spectral_decompose(f.u.v, opt.cluster_tol);
  auto upow = [&](double e) { return dec.apply([e](double r) { return std::pow(r, e); }); };
  const Mat um = upow(-m);

  cplx t = alpha_coefficient(g) * upow(1.0 - m).trace() + (um * f.w.v).trace();
  const double c = (m - 2) / 6.0;
  for (int mu = 0; mu < d; ++mu) {
    t += c * (0.5 * ab.alpha_up(mu) - ab.beta_up(mu)) * (um * f.u.d[mu]).trace();
    t += 0.5 * ab.beta_lo(mu) * (um * f.v[mu].v).trace();
    t -= 0.5 * (um * f.v[mu].d[mu]).trace();
    for (int nu = 0; nu < d; ++nu) t -= c * G(mu, nu) * (um * f.u.dd_at(mu, nu)).trace();
  }
  for (int l = 0; l < m; ++l) {
    const Mat a = upow(-l - 1.0), b = upow(static_cast<double>(l - m));
    const double cl = c - l * (m - l - 1) / (2.0 * m);
    for (int mu = 0; mu < d; ++mu) {
      t += (m - 2.0 * l) / (2.0 * m) * (a * f.v[mu].v * b * f.u.d[mu]).trace();
      for (int nu = 0; nu < d; ++nu) {
        t -= glo(mu, nu) / (4.0 * m) * (a * f.v[mu].v * b * f.v[nu].v).trace();
        t += cl * G(mu, nu) * (a * f.u.d[mu] * b * f.u.d[nu]).trace();
      }
    }
  }
  return r2_prefactor(d) * t;
}

// ----------------------------------------------------------------------------

size_t Grid::size() const {
  size_t s = 1;
  for (int k : n) s *= static_cast<size_t>(k);
  return s;
}

std::vector<double> Grid::point(size_t flat) const {
  std::vector<double> x(n.size());
  for (int a = dim() - 1; a >= 0; --a) {
    const size_t i = flat % static_cast<size_t>(n[a]);
    flat /= static_cast<size_t>(n[a]);
    x[a] = length[a] * static_cast<double>(i) / n[a];
  }
  return x;
}

double Grid::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < dim(); ++a) v *= length[a] / n[a];
  return v;
}

std::string to_string(FormUsed f) {
  switch (f) {
    case FormUsed::coordinate: return "coordinate";
    case FormUsed::covariant: return "covariant";
    case FormUsed::corollary_d2: return "corollary-d2";
    case FormUsed::corollary_d3: return "corollary-d3";
    case FormUsed::corollary_d4: return "corollary-d4";
    case FormUsed::corollary_even: return "corollary-even";
    case FormUsed::minimal: return "minimal";
    case FormUsed::conformal_like: return "conformal-like";
  }
  return "?";
}

namespace {

cplx pairwise_sum(const std::vector<cplx>& v, size_t lo, size_t hi) {
  if (hi - lo <= 8) {
    cplx s = 0.0;
    for (size_t i = lo; i < hi; ++i) s += v[i];
    return s;
  }
  const size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

}  // namespace

cplx a2_integrate(const std::vector<Mat>& a, const HeatDensityResult& result, Measure measure,
                  const std::vector<double>& sqrt_h) {
  const size_t n = result.grid.size();
  if (result.R2.size() != n || result.sqrt_g.size() != n)
    throw ValidationError("a2_integrate: density does not match its grid");
  if (!a.empty() && a.size() != n) throw ValidationError("a2_integrate: weight and density grids differ");
  if (measure == Measure::h_metric && sqrt_h.size() != n)
    throw ValidationError("a2_integrate: h volume density missing");
  std::vector<cplx> terms(n);
  double volume = 0.0;
  for (size_t i = 0; i < n; ++i) {
    if (!(result.sqrt_g[i] > 0.0)) throw DomainError("a2_integrate: metric volume density is not positive");
    const cplx tr = a.empty() ? result.R2[i].trace() : (a[i] * result.R2[i]).trace();
    if (measure == Measure::h_metric) {
      if (!(sqrt_h[i] > 0.0)) throw DomainError("a2_integrate: h is not positive");
      const double rescale = result.sqrt_g[i] / sqrt_h[i];
      terms[i] = rescale * tr * sqrt_h[i];
    } else {
      terms[i] = tr * result.sqrt_g[i];
    }
    volume += result.sqrt_g[i];
  }
  cplx total = pairwise_sum(terms, 0, n) * result.grid.cell_volume();
  if (measure == Measure::normalized) total /= volume * result.grid.cell_volume() * result.N;
  return total;
}

}  // namespace heatcoeff
