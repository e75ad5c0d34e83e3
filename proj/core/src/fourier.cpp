#include "heatcoeff/fourier.hpp"

#include "heatcoeff/errors.hpp"
#include "heatcoeff/parallel.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace heatcoeff {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double dot(const ModeIndex& k, const std::vector<double>& x) {
  double s = 0.0;
  for (size_t j = 0; j < k.size(); ++j) s += k[j] * x[j];
  return s;
}

void require_compatible(const FourierField& a, const FourierField& b, const char* where) {
  if (a.dim != b.dim || a.N != b.N) throw ValidationError(std::string(where) + ": field shapes differ");
}

}  // namespace

FourierField FourierField::constant(int dim, const Mat& c) {
  FourierField f(dim, static_cast<int>(c.rows()));
  f.modes[ModeIndex(dim, 0)] = c;
  return f;
}

FourierField FourierField::mode(const ModeIndex& k, const Mat& c) {
  FourierField f(static_cast<int>(k.size()), static_cast<int>(c.rows()));
  f.modes[k] = c;
  return f;
}

std::vector<Mat> truncated_dft(const std::vector<int>& n, std::vector<Mat> data, int radius) {
  const int d = static_cast<int>(n.size());
  if (data.empty()) return data;
  const int F = static_cast<int>(data.front().rows());
  std::vector<int> dims = n;
  Eigen::FFT<double> fft;
  for (int j = 0; j < d; ++j) {
    const int len = dims[j];
    if (len == 1) continue;
    const int K = 2 * radius + 1;
    size_t outer = 1, inner = 1;
    for (int i = 0; i < j; ++i) outer *= dims[i];
    for (int i = j + 1; i < d; ++i) inner *= dims[i];
    std::vector<Mat> next(outer * K * inner, Mat::Zero(F, data.front().cols()));
    std::vector<cplx> line(len), freq;
    for (size_t o = 0; o < outer; ++o)
      for (size_t in = 0; in < inner; ++in)
        for (int r = 0; r < F; ++r)
          for (int c = 0; c < data.front().cols(); ++c) {
            for (int t = 0; t < len; ++t) line[t] = data[(o * len + t) * inner + in](r, c);
            fft.fwd(freq, line);
            for (int kk = 0; kk < K; ++kk) {
              const int k = kk - radius;
              // keep one representative per alias class: -len/2 < k <= len/2
              if (2 * k <= -len || 2 * k > len) continue;
              next[(o * K + kk) * inner + in](r, c) = freq[((k % len) + len) % len] / static_cast<double>(len);
            }
          }
    data = std::move(next);
    dims[j] = K;
  }
  return data;
}

FourierField FourierField::from_samples(const std::vector<int>& n, const std::vector<Mat>& samples, int radius,
                                        double drop_tol) {
  const int d = static_cast<int>(n.size());
  size_t total = 1;
  for (int v : n) {
    if (v < 1) throw ValidationError("from_samples: grid sizes must be positive");
    total *= static_cast<size_t>(v);
  }
  if (samples.size() != total || samples.empty()) throw ValidationError("from_samples: sample count mismatch");
  const std::vector<Mat> c = truncated_dft(n, samples, radius);
  FourierField f(d, static_cast<int>(samples.front().rows()));
  std::vector<int> dims(d);
  for (int j = 0; j < d; ++j) dims[j] = n[j] == 1 ? 1 : 2 * radius + 1;
  double peak = 0.0;
  for (const auto& m : c) peak = std::max(peak, max_abs(m));
  for (size_t flat = 0; flat < c.size(); ++flat) {
    if (max_abs(c[flat]) <= drop_tol * peak) continue;
    ModeIndex k(d);
    size_t r = flat;
    for (int j = d - 1; j >= 0; --j) {
      k[j] = dims[j] == 1 ? 0 : static_cast<int>(r % dims[j]) - radius;
      r /= dims[j];
    }
    f.modes[k] = c[flat];
  }
  if (f.modes.empty()) f.modes[ModeIndex(d, 0)] = Mat::Zero(f.N, f.N);
  return f;
}

FourierField FourierField::from_function(int dim, int N, const std::vector<int>& n,
                                         const std::function<Mat(const std::vector<double>&)>& fn, int radius,
                                         double drop_tol) {
  if (static_cast<int>(n.size()) != dim) throw ValidationError("from_function: one grid size per axis");
  const auto pts = torus_points(n);
  std::vector<Mat> s(pts.size());
  parallel_for(pts.size(), [&](size_t i) {
    s[i] = fn(pts[i]);
    if (s[i].rows() != N || s[i].cols() != N) throw ValidationError("from_function: sample has the wrong shape");
  });
  return from_samples(n, s, radius, drop_tol);
}

Mat FourierField::coeff(const ModeIndex& k) const {
  const auto it = modes.find(k);
  return it == modes.end() ? Mat::Zero(N, N) : it->second;
}

Mat FourierField::value(const std::vector<double>& x) const {
  Mat r = Mat::Zero(N, N);
  for (const auto& [k, c] : modes) r += std::polar(1.0, dot(k, x)) * c;
  return r;
}

MatJet FourierField::jet(const std::vector<double>& x, int order) const {
  MatJet J(Mat::Zero(N, N), dim, order);
  for (const auto& [k, c] : modes) {
    const Mat T = std::polar(1.0, dot(k, x)) * c;
    J.v += T;
    if (order >= 1)
      for (int m = 0; m < dim; ++m)
        if (k[m] != 0) J.d[m] += cplx(0.0, k[m]) * T;
    if (order >= 2)
      for (int m = 0; m < dim; ++m)
        for (int n = 0; n < dim; ++n)
          if (k[m] != 0 && k[n] != 0) J.dd_at(m, n) -= static_cast<double>(k[m] * k[n]) * T;
  }
  return J;
}

int FourierField::radius() const {
  int r = 0;
  for (const auto& [k, c] : modes)
    for (int v : k) r = std::max(r, std::abs(v));
  return r;
}

std::vector<bool> FourierField::active_axes() const {
  std::vector<bool> a(dim, false);
  for (const auto& [k, c] : modes)
    for (int j = 0; j < dim; ++j)
      if (k[j] != 0) a[j] = true;
  return a;
}

void FourierField::validate() const {
  if (dim < 1 || N < 1) throw ValidationError("FourierField: dimension and fiber size must be positive");
  for (const auto& [k, c] : modes) {
    if (static_cast<int>(k.size()) != dim) throw ValidationError("FourierField: mode index has the wrong length");
    if (c.rows() != N || c.cols() != N) throw ValidationError("FourierField: coefficient has the wrong shape");
    if (!c.allFinite()) throw ValidationError("FourierField: non-finite coefficient");
  }
}

FourierField operator+(const FourierField& a, const FourierField& b) {
  require_compatible(a, b, "operator+");
  FourierField r = a;
  for (const auto& [k, c] : b.modes) {
    auto it = r.modes.find(k);
    if (it == r.modes.end())
      r.modes.emplace(k, c);
    else
      it->second += c;
  }
  return r;
}

FourierField operator-(const FourierField& a, const FourierField& b) { return a + cplx(-1.0) * b; }

FourierField operator*(cplx s, const FourierField& a) {
  FourierField r = a;
  for (auto& kv : r.modes) kv.second *= s;
  return r;
}

FourierField multiply(const FourierField& a, const FourierField& b, int radius) {
  require_compatible(a, b, "multiply");
  FourierField r(a.dim, a.N);
  ModeIndex k(a.dim);
  for (const auto& [ka, ca] : a.modes)
    for (const auto& [kb, cb] : b.modes) {
      bool keep = true;
      for (int j = 0; j < a.dim; ++j) {
        k[j] = ka[j] + kb[j];
        if (radius >= 0 && std::abs(k[j]) > radius) keep = false;
      }
      if (!keep) continue;
      auto it = r.modes.find(k);
      if (it == r.modes.end())
        r.modes.emplace(k, ca * cb);
      else
        it->second += ca * cb;
    }
  return r;
}

FourierField adjoint(const FourierField& a) {
  FourierField r(a.dim, a.N);
  for (const auto& [k, c] : a.modes) {
    ModeIndex n(k.size());
    for (size_t j = 0; j < k.size(); ++j) n[j] = -k[j];
    r.modes[n] = c.adjoint();
  }
  return r;
}

FourierField derive(const FourierField& a, int mu) {
  if (mu < 0 || mu >= a.dim) throw ValidationError("derive: direction out of range");
  FourierField r(a.dim, a.N);
  for (const auto& [k, c] : a.modes)
    if (k[mu] != 0) r.modes[k] = cplx(0.0, k[mu]) * c;
  if (r.modes.empty()) r.modes[ModeIndex(a.dim, 0)] = Mat::Zero(a.N, a.N);
  return r;
}

std::vector<std::vector<double>> torus_points(const std::vector<int>& n) {
  Grid g;
  g.n = n;
  g.length.assign(n.size(), kTwoPi);
  std::vector<std::vector<double>> pts(g.size());
  for (size_t i = 0; i < pts.size(); ++i) pts[i] = g.point(i);
  return pts;
}

// ----------------------------------------------------------------------------

void FourierOperator::validate() const {
  const int d = dim();
  if (d < 1 || g_inv.cols() != d) throw ValidationError("FourierOperator: metric must be square");
  MetricJet::constant(g_inv).validate();
  u.validate();
  w.validate();
  if (u.dim != d || w.dim != d || w.N != u.N) throw ValidationError("FourierOperator: field shapes differ");
  if (static_cast<int>(v.size()) != d) throw ValidationError("FourierOperator: v needs one field per direction");
  for (const auto& f : v) {
    f.validate();
    if (f.dim != d || f.N != u.N) throw ValidationError("FourierOperator: field shapes differ");
  }
}

std::vector<bool> FourierOperator::active_axes() const {
  std::vector<bool> a = u.active_axes();
  auto merge = [&](const FourierField& f) {
    const auto b = f.active_axes();
    for (size_t j = 0; j < a.size(); ++j) a[j] = a[j] || b[j];
  };
  for (const auto& f : v) merge(f);
  merge(w);
  return a;
}

PointFieldsUVW FourierOperator::point_fields(const std::vector<double>& x) const {
  PointFieldsUVW f;
  f.u = u.jet(x, 2);
  for (const auto& vi : v) f.v.push_back(vi.jet(x, 1));
  f.w = w.jet(x, 0);
  return f;
}

FourierOperator operator_from_upq(const RMat& g_inv, const FourierField& u, const std::vector<FourierField>& p,
                                  const FourierField& q) {
  const int d = static_cast<int>(g_inv.rows());
  if (static_cast<int>(p.size()) != d) throw ValidationError("operator_from_upq: p needs one field per direction");
  FourierOperator op;
  op.g_inv = g_inv;
  op.u = u;
  op.w = q;
  for (int nu = 0; nu < d; ++nu) {
    FourierField v = p[nu];
    for (int mu = 0; mu < d; ++mu)
      if (g_inv(mu, nu) != 0.0) v = v + cplx(g_inv(mu, nu)) * derive(u, mu);
    op.v.push_back(v);
  }
  return op;
}

FourierOperator conformal_like_operator(const RMat& g_inv, const FourierField& k) {
  const int d = static_cast<int>(g_inv.rows());
  FourierOperator op;
  op.g_inv = g_inv;
  op.u = k * k;
  std::vector<FourierField> dk;
  for (int mu = 0; mu < d; ++mu) dk.push_back(derive(k, mu));
  FourierField box = FourierField::constant(d, Mat::Zero(k.N, k.N));
  for (int nu = 0; nu < d; ++nu) {
    FourierField v = FourierField::constant(d, Mat::Zero(k.N, k.N));
    for (int mu = 0; mu < d; ++mu)
      if (g_inv(mu, nu) != 0.0) {
        v = v + cplx(2.0 * g_inv(mu, nu)) * (k * dk[mu]);
        box = box + cplx(g_inv(mu, nu)) * derive(dk[mu], nu);
      }
    op.v.push_back(v);
  }
  op.w = k * box;
  return op;
}

HeatDensityResult fourier_heat_density(const FourierOperator& op, int points, DensityForm form,
                                       const LocalOptions& lopt, const SpectralOptions& sopt) {
  op.validate();
  if (points < 1) throw ValidationError("fourier_heat_density: points must be positive");
  const int d = op.dim();
  const int N = op.N();
  const MetricJet g = MetricJet::constant(op.g_inv);
  const MetricData md = metric_data(g);

  const auto branch = corollary_branch_for(d);
  if (form == DensityForm::automatic) form = branch ? DensityForm::corollary : DensityForm::covariant;
  if (form == DensityForm::corollary && !branch)
    throw DomainError("fourier_heat_density: no corollary for d = " + std::to_string(d));

  HeatDensityResult res;
  res.N = N;
  res.grid.n.assign(d, 1);
  res.grid.length.assign(d, kTwoPi);
  const auto active = op.active_axes();
  for (int j = 0; j < d; ++j)
    if (active[j]) res.grid.n[j] = points;
  switch (form) {
    case DensityForm::coordinate: res.form_used = FormUsed::coordinate; break;
    case DensityForm::covariant: res.form_used = FormUsed::covariant; break;
    default:
      switch (*branch) {
        case CorollaryBranch::d2: res.form_used = FormUsed::corollary_d2; break;
        case CorollaryBranch::d3: res.form_used = FormUsed::corollary_d3; break;
        case CorollaryBranch::d4: res.form_used = FormUsed::corollary_d4; break;
        case CorollaryBranch::even: res.form_used = FormUsed::corollary_even; break;
      }
  }

  std::optional<FFunctions> F;
  std::optional<GFunctions> G;
  if (form == DensityForm::coordinate) F = f_generic(d, sopt);
  if (form == DensityForm::covariant) G = g_generic(d, sopt);

  const size_t n = res.grid.size();
  res.R2.resize(n);
  res.clusters.resize(n);
  res.sqrt_g.assign(n, 1.0 / std::sqrt(op.g_inv.determinant()));
  const std::vector<MatJet> A(d, MatJet(Mat::Zero(N, N), d, 1));
  parallel_for(n, [&](size_t i) {
    const PointFieldsUVW f = op.point_fields(res.grid.point(i));
    res.clusters[i] = spectral_decompose(hermitian_part(f.u.v), lopt.cluster_tol).clusters();
    if (form == DensityForm::coordinate) {
      res.R2[i] = r2_local_uvw(g, f, *F, lopt);
    } else {
      const PointFieldsUPQ upq = uvw_to_upq(md, g, f, A);
      res.R2[i] = form == DensityForm::covariant ? r2_local_upq(g, upq, *G, lopt)
                                                 : r2_corollary(*branch, g, upq, lopt, sopt);
    }
  });
  res.confluent_points =
      static_cast<int>(std::count_if(res.clusters.begin(), res.clusters.end(), [N](int c) { return c < N; }));
  return res;
}

std::vector<Mat> sample_on(const FourierField& f, const Grid& grid) {
  std::vector<Mat> s(grid.size());
  parallel_for(s.size(), [&](size_t i) { s[i] = f.value(grid.point(i)); });
  return s;
}

}  // namespace heatcoeff
