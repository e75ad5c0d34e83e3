#include "heatcoeff/nct.hpp"

#include "heatcoeff/errors.hpp"
#include "heatcoeff/fourier.hpp"
#include "heatcoeff/parallel.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/FFT>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace heatcoeff {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

long mod(long a, long q) {
  const long r = a % q;
  return r < 0 ? r + q : r;
}

//! e^{-2 pi i p b c / q} with the exponent reduced mod q first.
cplx commutation_phase(const Rational& th, long b, long c) {
  const long e = mod(mod(th.p, th.q) * mod(b, th.q) % th.q * mod(c, th.q), th.q);
  return std::polar(1.0, -kTwoPi * static_cast<double>(e) / static_cast<double>(th.q));
}

void require_same(const NctElement& a, const NctElement& b, const char* where) {
  if (!a.same_algebra(b)) throw ValidationError(std::string(where) + ": elements live in different algebras");
}

double phase_dot(const NctIndex& k, const std::vector<double>& x) {
  double s = 0.0;
  for (size_t j = 0; j < k.size(); ++j) s += k[j] * x[j];
  return s;
}

}  // namespace

// ----------------------------------------------------------------------------

void Rational::validate() const {
  if (q <= 0) throw ValidationError("theta: denominator must be positive");
  if (std::gcd(std::abs(p), q) != 1) throw ValidationError("theta: p/q must be in lowest terms");
}

std::pair<Mat, Mat> clock_shift(long q, long p) {
  Rational{p, q}.validate();
  const int n = static_cast<int>(q);
  Mat U = Mat::Zero(n, n), V = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    U(i, (i + 1) % n) = 1.0;
    V(i, i) = std::polar(1.0, kTwoPi * static_cast<double>(mod(p * i, q)) / static_cast<double>(q));
  }
  return {U, V};
}

NctElement::NctElement(int m_, std::vector<Rational> theta_) : m(m_), theta(std::move(theta_)) { validate(); }

int NctElement::fiber_dim() const {
  long f = 1;
  for (const auto& t : theta) f *= t.q;
  return static_cast<int>(f);
}

int NctElement::radius() const {
  int r = 0;
  for (const auto& [k, c] : coeffs)
    for (int v : k) r = std::max(r, std::abs(v));
  return r;
}

cplx NctElement::coeff(const NctIndex& k) const {
  const auto it = coeffs.find(k);
  return it == coeffs.end() ? cplx(0.0) : it->second;
}

void NctElement::add(const NctIndex& k, cplx c) {
  if (static_cast<int>(k.size()) != dim()) throw ValidationError("NctElement: index length must be 2m");
  coeffs[k] += c;
}

void NctElement::prune(double tol) {
  std::erase_if(coeffs, [tol](const auto& kv) { return std::abs(kv.second) <= tol; });
}

void NctElement::validate() const {
  if (m < 1 || m > 2) throw ValidationError("NctElement: m must be 1 or 2");
  if (static_cast<int>(theta.size()) != m) throw ValidationError("NctElement: theta needs one rational per pair");
  for (const auto& t : theta) t.validate();
  for (const auto& [k, c] : coeffs) {
    if (static_cast<int>(k.size()) != dim()) throw ValidationError("NctElement: index length must be 2m");
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw ValidationError("NctElement: non-finite coefficient");
  }
}

bool NctElement::same_algebra(const NctElement& o) const {
  if (m != o.m) return false;
  for (int i = 0; i < m; ++i)
    if (theta[i].p != o.theta[i].p || theta[i].q != o.theta[i].q) return false;
  return true;
}

NctElement NctElement::scalar(int m, std::vector<Rational> theta, cplx c) {
  NctElement e(m, std::move(theta));
  e.coeffs[NctIndex(2 * m, 0)] = c;
  return e;
}

NctElement NctElement::monomial(int m, std::vector<Rational> theta, const NctIndex& k, cplx c) {
  NctElement e(m, std::move(theta));
  e.add(k, c);
  return e;
}

NctElement operator+(const NctElement& a, const NctElement& b) {
  require_same(a, b, "operator+");
  NctElement r = a;
  for (const auto& [k, c] : b.coeffs) r.coeffs[k] += c;
  return r;
}

NctElement operator-(const NctElement& a, const NctElement& b) { return a + cplx(-1.0) * b; }

NctElement operator*(cplx s, const NctElement& a) {
  NctElement r = a;
  for (auto& kv : r.coeffs) kv.second *= s;
  return r;
}

NctElement multiply(const NctElement& a, const NctElement& b, int radius, double* dropped) {
  require_same(a, b, "multiply");
  NctElement r(a.m, a.theta);
  NctIndex idx(a.dim());
  for (const auto& [ka, ca] : a.coeffs)
    for (const auto& [kb, cb] : b.coeffs) {
      cplx ph = 1.0;
      for (int i = 0; i < a.m; ++i) ph *= commutation_phase(a.theta[i], ka[2 * i + 1], kb[2 * i]);
      for (int j = 0; j < a.dim(); ++j) idx[j] = ka[j] + kb[j];
      r.coeffs[idx] += ph * ca * cb;
    }
  double lost = 0.0;
  if (radius >= 0)
    std::erase_if(r.coeffs, [&](const auto& kv) {
      for (int v : kv.first)
        if (std::abs(v) > radius) {
          lost += std::abs(kv.second);
          return true;
        }
      return false;
    });
  if (dropped) *dropped = lost;
  return r;
}

NctElement adjoint(const NctElement& a) {
  NctElement r(a.m, a.theta);
  for (const auto& [k, c] : a.coeffs) {
    cplx ph = 1.0;
    for (int i = 0; i < a.m; ++i) ph *= commutation_phase(a.theta[i], k[2 * i], k[2 * i + 1]);
    NctIndex neg(k.size());
    for (size_t j = 0; j < k.size(); ++j) neg[j] = -k[j];
    r.coeffs[neg] += std::conj(c) * ph;
  }
  return r;
}

cplx nct_trace(const NctElement& a) { return a.coeff(NctIndex(a.dim(), 0)); }

NctElement nct_derive(const NctElement& a, int mu) {
  if (mu < 0 || mu >= a.dim()) throw ValidationError("nct_derive: direction out of range");
  NctElement r(a.m, a.theta);
  for (const auto& [k, c] : a.coeffs)
    if (k[mu] != 0) r.coeffs[k] = cplx(0.0, k[mu]) * c;
  return r;
}

// ----------------------------------------------------------------------------
// realisation

NctRealizer::NctRealizer(const NctElement& shape) : m_(shape.m) {
  shape.validate();
  fiber_ = shape.fiber_dim();
  for (const auto& t : shape.theta) {
    q_.push_back(t.q);
    const auto [U, V] = clock_shift(t.q, t.p);
    std::vector<Mat> up{identity(static_cast<int>(t.q))}, vp{identity(static_cast<int>(t.q))};
    for (long e = 1; e < t.q; ++e) {
      up.push_back(up.back() * U);
      vp.push_back(vp.back() * V);
    }
    upow_.push_back(std::move(up));
    vpow_.push_back(std::move(vp));
  }
}

Mat NctRealizer::monomial(const NctIndex& k) const {
  Mat M = identity(1);
  for (int i = 0; i < m_; ++i) {
    const Mat P = upow_[i][mod(k[2 * i], q_[i])] * vpow_[i][mod(k[2 * i + 1], q_[i])];
    M = Eigen::kroneckerProduct(M, P).eval();
  }
  return M;
}

Mat NctRealizer::operator()(const NctElement& a, const std::vector<double>& x) const {
  Mat r = Mat::Zero(fiber_, fiber_);
  for (const auto& [k, c] : a.coeffs) r += c * std::polar(1.0, phase_dot(k, x)) * monomial(k);
  return r;
}

MatJet NctRealizer::jet(const NctElement& a, const std::vector<double>& x, int order) const {
  const int d = 2 * m_;
  MatJet J(Mat::Zero(fiber_, fiber_), d, order);
  for (const auto& [k, c] : a.coeffs) {
    const Mat T = (c * std::polar(1.0, phase_dot(k, x))) * monomial(k);
    J.v += T;
    if (order >= 1)
      for (int mu = 0; mu < d; ++mu) J.d[mu] += cplx(0.0, k[mu]) * T;
    if (order >= 2)
      for (int mu = 0; mu < d; ++mu)
        for (int nu = 0; nu < d; ++nu) J.dd_at(mu, nu) -= static_cast<double>(k[mu] * k[nu]) * T;
  }
  return J;
}

Mat realize(const NctElement& a, const std::vector<double>& x) { return NctRealizer(a)(a, x); }

double equivariance_residual(const NctElement& a, const std::vector<double>& x, int pair, int m_shift,
                             int n_shift) {
  if (pair < 0 || pair >= a.m) throw ValidationError("equivariance_residual: pair out of range");
  const NctRealizer re(a);
  const Rational& th = a.theta[pair];
  std::vector<double> y = x;
  y[2 * pair] += kTwoPi * static_cast<double>(th.p * m_shift) / static_cast<double>(th.q);
  y[2 * pair + 1] += kTwoPi * static_cast<double>(th.p * n_shift) / static_cast<double>(th.q);
  // W = U0^n V0^{-m} on the shifted pair, identity elsewhere
  Mat W = identity(1);
  for (int i = 0; i < a.m; ++i) {
    const auto [U, V] = clock_shift(a.theta[i].q, a.theta[i].p);
    Mat P = identity(static_cast<int>(a.theta[i].q));
    if (i == pair) {
      Mat Un = identity(P.rows()), Vm = identity(P.rows());
      for (long e = 0; e < mod(n_shift, th.q); ++e) Un = Un * U;
      for (long e = 0; e < mod(-m_shift, th.q); ++e) Vm = Vm * V;
      P = Un * Vm;
    }
    W = Eigen::kroneckerProduct(W, P).eval();
  }
  const Mat lhs = re(a, y);
  const Mat rhs = W * re(a, x) * W.adjoint();
  return max_abs(lhs - rhs);
}

namespace {
double sqrt_det_g(const RMat& g_inv) {
  const double det = g_inv.determinant();
  if (!(det > 0)) throw DomainError("metric must be positive definite");
  return 1.0 / std::sqrt(det);
}
}  // namespace

cplx phi_correspondence(const NctElement& a, const std::vector<RMat>& g_inv, int points) {
  if (static_cast<int>(g_inv.size()) != a.m) throw ValidationError("phi_correspondence: one metric per pair");
  const NctRealizer re(a);
  const int n = points > 0 ? points : std::max(4, a.radius() + 2);
  const int d = a.dim();
  double factor = 1.0;
  std::vector<double> step(d);
  for (int i = 0; i < a.m; ++i) {
    factor *= sqrt_det_g(g_inv[i]) * static_cast<double>(a.theta[i].q);
    step[2 * i] = step[2 * i + 1] = kTwoPi / static_cast<double>(a.theta[i].q) / n;
  }
  size_t total = 1;
  for (int j = 0; j < d; ++j) total *= static_cast<size_t>(n);
  std::vector<cplx> traces(total);
  parallel_for(total, [&](size_t flat) {
    std::vector<double> x(d);
    size_t r = flat;
    for (int j = d - 1; j >= 0; --j) {
      x[j] = step[j] * static_cast<double>(r % n);
      r /= n;
    }
    traces[flat] = re(a, x).trace();
  });
  cplx sum = 0.0;
  for (const cplx& t : traces) sum += t;
  double cell = 1.0;
  for (int j = 0; j < d; ++j) cell *= step[j];
  return factor * cell * sum;
}

cplx phi_expected(const NctElement& a, const std::vector<RMat>& g_inv) {
  if (static_cast<int>(g_inv.size()) != a.m) throw ValidationError("phi_expected: one metric per pair");
  double f = std::pow(kTwoPi, a.dim());
  for (const auto& g : g_inv) f *= sqrt_det_g(g);
  return f * nct_trace(a);
}

// ----------------------------------------------------------------------------
// sampling and coefficient extraction

SampleGrid sample_grid_for(const NctElement& a, int points) {
  SampleGrid g;
  g.n.assign(a.dim(), 1);
  for (const auto& [k, c] : a.coeffs)
    for (int j = 0; j < a.dim(); ++j)
      if (k[j] != 0) g.n[j] = points;
  return g;
}

namespace {
size_t grid_size(const SampleGrid& g) {
  size_t s = 1;
  for (int v : g.n) s *= static_cast<size_t>(v);
  return s;
}
}  // namespace

std::vector<Mat> sample(const NctElement& a, const SampleGrid& grid) {
  const int d = a.dim();
  if (static_cast<int>(grid.n.size()) != d) throw ValidationError("sample: grid dimension mismatch");
  const NctRealizer re(a);
  const int F = re.fiber();
  const size_t total = grid_size(grid);
  std::vector<Mat> data(total, Mat::Zero(F, F));
  // e^{i k x_t} = e^{i (k mod n) x_t} on the grid, so binning is exact
  for (const auto& [k, c] : a.coeffs) {
    size_t flat = 0;
    for (int j = 0; j < d; ++j) flat = flat * grid.n[j] + static_cast<size_t>(mod(k[j], grid.n[j]));
    data[flat] += c * re.monomial(k);
  }
  Eigen::FFT<double> fft;
  for (int j = 0; j < d; ++j) {
    const int n = grid.n[j];
    if (n == 1) continue;
    size_t outer = 1, inner = 1;
    for (int i = 0; i < j; ++i) outer *= grid.n[i];
    for (int i = j + 1; i < d; ++i) inner *= grid.n[i];
    std::vector<cplx> line(n), vals;
    for (size_t o = 0; o < outer; ++o)
      for (size_t in = 0; in < inner; ++in)
        for (int r = 0; r < F; ++r)
          for (int c = 0; c < F; ++c) {
            for (int t = 0; t < n; ++t) line[t] = data[(o * n + t) * inner + in](r, c);
            fft.inv(vals, line);
            for (int t = 0; t < n; ++t) data[(o * n + t) * inner + in](r, c) = vals[t] * static_cast<double>(n);
          }
  }
  return data;
}

std::vector<MatJet> sample_jets(const NctElement& a, const SampleGrid& grid, int order) {
  const int d = a.dim();
  const std::vector<Mat> v = sample(a, grid);
  std::vector<std::vector<Mat>> d1, d2;
  if (order >= 1)
    for (int mu = 0; mu < d; ++mu) d1.push_back(sample(nct_derive(a, mu), grid));
  if (order >= 2)
    for (int mu = 0; mu < d; ++mu)
      for (int nu = mu; nu < d; ++nu) d2.push_back(sample(nct_derive(nct_derive(a, mu), nu), grid));
  std::vector<MatJet> out(v.size());
  for (size_t i = 0; i < v.size(); ++i) {
    MatJet J(v[i], d, order);
    for (int mu = 0; mu < static_cast<int>(d1.size()); ++mu) J.d[mu] = d1[mu][i];
    size_t idx = 0;
    if (order >= 2)
      for (int mu = 0; mu < d; ++mu)
        for (int nu = mu; nu < d; ++nu, ++idx) J.dd_at(mu, nu) = J.dd_at(nu, mu) = d2[idx][i];
    out[i] = std::move(J);
  }
  return out;
}

NctElement extract_coefficients(const NctElement& shape, const SampleGrid& grid, const std::vector<Mat>& samples,
                                int radius) {
  const int d = shape.dim();
  if (static_cast<int>(grid.n.size()) != d) throw ValidationError("extract_coefficients: grid dimension mismatch");
  if (samples.size() != grid_size(grid)) throw ValidationError("extract_coefficients: sample count mismatch");
  const NctRealizer re(shape);
  const int F = re.fiber();

  const std::vector<Mat> data = truncated_dft(grid.n, samples, radius);
  std::vector<int> dims(d);
  for (int j = 0; j < d; ++j) dims[j] = grid.n[j] == 1 ? 1 : 2 * radius + 1;

  NctElement out(shape.m, shape.theta);
  double peak = 0.0;
  for (size_t flat = 0; flat < data.size(); ++flat) {
    NctIndex k(d);
    size_t r = flat;
    for (int j = d - 1; j >= 0; --j) {
      k[j] = dims[j] == 1 ? 0 : static_cast<int>(r % dims[j]) - radius;
      r /= dims[j];
    }
    const cplx a = (re.monomial(k).adjoint() * data[flat]).trace() / static_cast<double>(F);
    out.coeffs[k] = a;
    peak = std::max(peak, std::abs(a));
  }
  out.prune(1e-15 * peak);
  return out;
}

NctElement nct_function(const NctElement& h, const std::function<double(double)>& f, int radius, int points) {
  if (radius < 0 || points < 1) throw ValidationError("nct_function: radius and points must be positive");
  const SampleGrid grid = sample_grid_for(h, points);
  std::vector<Mat> s = sample(h, grid);
  parallel_for(s.size(), [&](size_t i) {
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(s[i]));
    if (es.info() != Eigen::Success) throw EigenError("nct_function: eigensolver failed");
    RVec fv = es.eigenvalues().unaryExpr(f);
    s[i] = es.eigenvectors() * fv.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
  });
  return extract_coefficients(h, grid, s, radius);
}

NctElement nct_exp_taylor(const NctElement& h, double s, int radius, int terms) {
  NctElement sum = NctElement::scalar(h.m, h.theta, 1.0);
  NctElement term = sum;
  for (int n = 1; n <= terms; ++n) {
    term = cplx(s / n) * multiply(term, h, radius);
    sum = sum + term;
  }
  return sum;
}

// ----------------------------------------------------------------------------
// two-torus

RMat tau_metric(cplx tau) {
  if (tau.imag() == 0.0) throw DomainError("tau must have a non-zero imaginary part");
  RMat g(2, 2);
  g << 1.0, tau.real(), tau.real(), std::norm(tau);
  return g;
}

Eigen::Matrix2cd tau_h(cplx tau) {
  const cplx e[2] = {1.0, tau};
  Eigen::Matrix2cd h;
  for (int m = 0; m < 2; ++m)
    for (int n = 0; n < 2; ++n) h(m, n) = std::conj(e[m]) * e[n];
  return h;
}

Eigen::Matrix2cd tau_f(cplx tau) {
  const Eigen::Matrix2cd h = tau_h(tau);
  return 0.5 * (h - h.transpose());
}

Nct2Operator nct2_operator(const NctElement& k, cplx tau, int radius) {
  if (k.m != 1) throw ValidationError("nct2_operator: k must live on a two-torus");
  Nct2Operator op;
  op.tau = tau;
  op.g_inv = tau_metric(tau);
  const Eigen::Matrix2cd f = tau_f(tau);
  op.k = k;
  op.u = multiply(k, k, radius);
  op.dk = {nct_derive(k, 0), nct_derive(k, 1)};
  op.box_k = NctElement(k.m, k.theta);
  for (int m = 0; m < 2; ++m)
    for (int n = 0; n < 2; ++n) op.box_k = op.box_k + cplx(op.g_inv(m, n)) * nct_derive(op.dk[m], n);
  std::vector<NctElement> comm, anti;
  for (int m = 0; m < 2; ++m) {
    const NctElement a = multiply(k, op.dk[m], radius), b = multiply(op.dk[m], k, radius);
    comm.push_back(a - b);
    anti.push_back(a + b);
  }
  for (int nu = 0; nu < 2; ++nu) {
    NctElement p1(k.m, k.theta), p2(k.m, k.theta);
    for (int mu = 0; mu < 2; ++mu) {
      p1 = p1 + cplx(op.g_inv(mu, nu)) * comm[mu];
      p2 = p2 + f(nu, mu) * anti[mu];
    }
    op.p1.push_back(p1);
    op.p2.push_back(p2);
  }
  // q_1 = -k (Delta k) with Delta k = -box k
  op.q1 = multiply(k, op.box_k, radius);
  op.q2 = NctElement(k.m, k.theta);
  return op;
}

namespace {

void check_positive(const Mat& k, const char* where) {
  const double scale = std::max(max_abs(k), 1.0);
  if (max_abs(k - k.adjoint()) > 1e-8 * scale)
    throw DomainError(std::string(where) + ": k is not self-adjoint on the sample grid");
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(k), Eigen::EigenvaluesOnly);
  if (!(es.eigenvalues().minCoeff() > 0)) throw DomainError(std::string(where) + ": k is not positive");
}

std::vector<MatJet> zero_connection(int d, int N) {
  return std::vector<MatJet>(d, MatJet(Mat::Zero(N, N), d, 1));
}

double relative_gap(double a, double b) { return std::abs(a - b) / std::max(a, b); }

}  // namespace

Mat nct2_density_closed(const MatJet& kj, cplx tau, double cluster_tol) {
  const RMat g = tau_metric(tau);
  const Eigen::Matrix2cd f = tau_f(tau);
  const int N = static_cast<int>(kj.v.rows());
  const Mat u = kj.v * kj.v;
  const SpectralDecomposition dec = spectral_decompose(hermitian_part(u), cluster_tol);

  Mat lap = Mat::Zero(N, N);  // Delta k = -g^{mu nu} d_mu d_nu k
  for (int m = 0; m < 2; ++m)
    for (int n = 0; n < 2; ++n) lap -= g(m, n) * kj.dd_at(m, n);

  static const GFunctions G = g_generic(2);
  auto closed_or_generic = [](auto closed, auto generic) {
    return [closed, generic](std::span<const double> r) {
      const double a = std::sqrt(r[0]), b = std::sqrt(r[1]), c = std::sqrt(r[2]);
      const double gap = std::min({relative_gap(a, b), relative_gap(b, c), relative_gap(a, c)});
      return gap > 0.05 ? closed(r[0], r[1], r[2]) : generic(G, r[0], r[1], r[2]);
    };
  };
  const SpectralTable tdk = tabulate([](std::span<const double> r) { return nct2_fdk_stable(r[0], r[1]); }, 1, dec);
  const SpectralTable tg = tabulate(closed_or_generic(nct2_fg_closed, nct2_fg), 2, dec);
  const SpectralTable tf = tabulate(closed_or_generic(nct2_ff_closed, nct2_ff), 2, dec);

  std::vector<Mat> dkt = {dec.rotate_in(kj.d[0]), dec.rotate_in(kj.d[1])};
  const Mat lapt = dec.rotate_in(lap);
  Mat acc = apply_rotated(tdk, dec, std::span<const Mat>(&lapt, 1));
  for (int m = 0; m < 2; ++m)
    for (int n = 0; n < 2; ++n) {
      const std::vector<Mat> bs = {dkt[m], dkt[n]};
      if (g(m, n) != 0.0) acc += g(m, n) * apply_rotated(tg, dec, bs);
      if (f(m, n) != cplx(0.0)) acc += f(m, n) * apply_rotated(tf, dec, bs);
    }
  return dec.rotate_out(acc) / (4.0 * std::numbers::pi);
}

Nct2Curvature nct2_curvature(const NctElement& k, cplx tau, const NctCurvatureOptions& opt) {
  if (k.m != 1) throw ValidationError("nct2_curvature: k must live on a two-torus");
  if (opt.points < 2 * opt.radius + 1)
    throw ValidationError("nct2_curvature: need at least 2 radius + 1 samples per axis");
  const RMat g_inv = tau_metric(tau);
  const MetricJet g = MetricJet::constant(g_inv);
  const Eigen::Matrix2cd f = tau_f(tau);
  const int N = k.fiber_dim();
  static const GFunctions G = g_generic(2);
  const LocalOptions lopt{opt.cluster_tol};

  Nct2Curvature out;
  out.grid = sample_grid_for(k, opt.points);
  const std::vector<MatJet> jets = sample_jets(k, out.grid, 2);
  out.samples.resize(jets.size());
  std::vector<double> resid(out.samples.size(), 0.0);
  parallel_for(out.samples.size(), [&](size_t flat) {
    const MatJet& kj = jets[flat];
    check_positive(kj.v, "nct2_curvature");
    const auto A = zero_connection(2, N);
    const Mat r1 = r2_conformal_like(g, kj, A, G, lopt);

    PointFieldsUPQ p2;
    p2.u = kj * kj;
    const MatJet du[2] = {partial(p2.u, 0), partial(p2.u, 1)};
    for (int nu = 0; nu < 2; ++nu) p2.p.push_back(scaled(du[0], f(nu, 0)) + scaled(du[1], f(nu, 1)));
    p2.q = MatJet(Mat::Zero(N, N), 2, 2);
    p2.A = A;
    const Mat r2 = r2_local_upq(g, p2, G, lopt);

    out.samples[flat] = r1 + r2;
    const Mat closed = nct2_density_closed(kj, tau, opt.cluster_tol);
    resid[flat] = max_abs(out.samples[flat] - closed);
  });
  out.closed_form_residual = *std::max_element(resid.begin(), resid.end());
  out.R2 = extract_coefficients(k, out.grid, out.samples, opt.radius);
  return out;
}

// ----------------------------------------------------------------------------
// four-torus

PointFieldsUVW nct4_fields(const MatJet& u, const RMat& g_inv) {
  const int d = u.dim;
  const int N = static_cast<int>(u.v.rows());
  const Mat ui = u.v.inverse();
  PointFieldsUVW f;
  f.u = u;
  std::vector<MatJet> du;
  for (int n = 0; n < d; ++n) du.push_back(partial(u, n));
  for (int m = 0; m < d; ++m) {
    MatJet v(Mat::Zero(N, N), d, 1);
    for (int n = 0; n < d; ++n)
      if (g_inv(m, n) != 0.0) v = v + scaled(du[n], g_inv(m, n));
    f.v.push_back(v);
  }
  Mat w = Mat::Zero(N, N);
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n)
      if (g_inv(m, n) != 0.0) w += g_inv(m, n) * (u.dd_at(m, n) - u.d[m] * ui * u.d[n]);
  f.w = MatJet(w, d, 0);
  return f;
}

Mat nct4_density_closed(const MatJet& u, const RMat& g_inv) {
  const int d = u.dim;
  const Mat ui = u.v.inverse();
  Mat acc = Mat::Zero(u.v.rows(), u.v.cols());
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n)
      if (g_inv(m, n) != 0.0)
        acc += g_inv(m, n) * (ui * u.dd_at(m, n) * ui - 1.5 * ui * u.d[m] * ui * u.d[n] * ui);
  return acc / (32.0 * std::numbers::pi * std::numbers::pi);
}

Nct4Curvature nct4_curvature(const NctElement& k, const RMat& g_inv, const NctCurvatureOptions& opt) {
  if (k.m != 2) throw ValidationError("nct4_curvature: k must live on a four-torus");
  if (g_inv.rows() != 4 || g_inv.cols() != 4) throw ValidationError("nct4_curvature: metric must be 4 x 4");
  if (opt.points < 2 * opt.radius + 1)
    throw ValidationError("nct4_curvature: need at least 2 radius + 1 samples per axis");
  const MetricJet g = MetricJet::constant(g_inv);
  g.validate();
  const MetricData md = metric_data(g);
  const int N = k.fiber_dim();
  const LocalOptions lopt{opt.cluster_tol};

  Nct4Curvature out;
  out.grid = sample_grid_for(k, opt.points);
  const std::vector<MatJet> jets = sample_jets(k, out.grid, 2);
  out.samples.resize(jets.size());
  std::vector<double> resid(out.samples.size(), 0.0);
  parallel_for(out.samples.size(), [&](size_t flat) {
    const MatJet& kj = jets[flat];
    check_positive(kj.v, "nct4_curvature");
    const MatJet u = kj * kj;
    out.samples[flat] = nct4_density_closed(u, g_inv);
    const PointFieldsUPQ upq = uvw_to_upq(md, g, nct4_fields(u, g_inv), zero_connection(4, N));
    const Mat cor = r2_corollary(CorollaryBranch::d4, g, upq, lopt);
    resid[flat] = max_abs(out.samples[flat] - cor);
  });
  out.corollary_residual = *std::max_element(resid.begin(), resid.end());
  out.R2 = extract_coefficients(k, out.grid, out.samples, opt.radius);
  return out;
}

}  // namespace heatcoeff
