#include "heatcoeff/modular.hpp"

#include "heatcoeff/divided_difference.hpp"
#include "heatcoeff/errors.hpp"
#include "heatcoeff/spectral_functions.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>

namespace heatcoeff {

double modular_g1(double y) {
  if (!(y > 0.0)) throw DomainError("modular_g1: y must be positive");
  const double a = 0.5 * std::log(y);
  return 0.5 * divided_difference({0.0, a}, ExpModel{});
}

double modular_g2(double y1, double y2) {
  if (!(y1 > 0.0 && y2 > 0.0)) throw DomainError("modular_g2: arguments must be positive");
  // half the second divided difference of exp at 0, a, a + b
  const double a = 0.5 * std::log(y1), b = 0.5 * std::log(y2);
  return 0.5 * divided_difference({0.0, a, a + b}, ExpModel{});
}

Mat ModularSpectralData::project(int iy, const Mat& b) const {
  const Mat bt = dec.rotate_in(b);
  Mat r = Mat::Zero(dec.N, dec.N);
  for (const auto& [i, j] : pairs.at(iy))
    r.block(dec.offset[i], dec.offset[j], dec.count[i], dec.count[j]) =
        bt.block(dec.offset[i], dec.offset[j], dec.count[i], dec.count[j]);
  return dec.rotate_out(r);
}

ModularSpectralData modular_spectrum(const Mat& u, double cluster_tol, double ratio_tol) {
  ModularSpectralData ms;
  ms.dec = spectral_decompose(u, cluster_tol);
  struct Entry {
    double y;
    int i, j;
  };
  std::vector<Entry> all;
  const int m = ms.dec.clusters();
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) all.push_back({ms.dec.values[j] / ms.dec.values[i], i, j});
  std::sort(all.begin(), all.end(), [](const Entry& a, const Entry& b) { return a.y < b.y; });
  for (const Entry& e : all) {
    if (ms.ratios.empty() || e.y - ms.ratios.back() > ratio_tol * e.y) {
      ms.ratios.push_back(e.y);
      ms.pairs.emplace_back();
    }
    ms.pairs.back().emplace_back(e.i, e.j);
  }
  return ms;
}

namespace {

void modular_recurse(const ModularFn& f, const ModularSpectralData& ms, const std::vector<std::vector<Mat>>& proj,
                     std::vector<double>& ys, const Mat& left, double r0, size_t level, Mat& out) {
  if (level == proj.size()) {
    const double v = f(r0, ys);
    if (!std::isfinite(v)) throw EvaluationError("modular_apply: non-finite spectral value");
    if (v != 0.0) out += v * left;
    return;
  }
  for (int iy = 0; iy < ms.size(); ++iy) {
    const Mat next = left * proj[level][iy];
    if (max_abs(next) == 0.0) continue;
    ys[level] = ms.ratios[iy];
    modular_recurse(f, ms, proj, ys, next, r0, level + 1, out);
  }
}

}  // namespace

Mat modular_apply(const ModularFn& f, const ModularSpectralData& ms, const Mat& b0, std::span<const Mat> bs) {
  const int N = ms.dec.N;
  std::vector<std::vector<Mat>> proj(bs.size());
  for (size_t l = 0; l < bs.size(); ++l)
    for (int iy = 0; iy < ms.size(); ++iy) proj[l].push_back(ms.project(iy, bs[l]));
  Mat out = Mat::Zero(N, N);
  std::vector<double> ys(bs.size());
  for (int c = 0; c < ms.dec.clusters(); ++c)
    modular_recurse(f, ms, proj, ys, Mat(b0 * ms.dec.projector(c)), ms.dec.values[c], 0, out);
  return out;
}

Mat modular_calculus(const std::function<double(double)>& g, const ModularSpectralData& ms, const Mat& b) {
  Mat out = Mat::Zero(ms.dec.N, ms.dec.N);
  for (int iy = 0; iy < ms.size(); ++iy) out += g(ms.ratios[iy]) * ms.project(iy, b);
  return out;
}

std::pair<Mat, Mat> rearrange(const std::function<double(std::span<const double>)>& F, const Mat& u,
                              std::span<const Mat> bs) {
  if (bs.empty()) throw ValidationError("rearrange: at least b_0 is required");
  const ModularSpectralData ms = modular_spectrum(u);
  const std::span<const Mat> rest = bs.subspan(1);
  const Mat lhs = bs[0] * sandwich_sum(F, ms.dec, rest);
  const ModularFn f = [&F](double r0, std::span<const double> y) {
    std::vector<double> r(y.size() + 1);
    r[0] = r0;
    for (size_t i = 0; i < y.size(); ++i) r[i + 1] = r[i] * y[i];
    return F(r);
  };
  const Mat rhs = modular_apply(f, ms, bs[0], rest);
  return {lhs, rhs};
}

namespace {

Mat hermitian_function(const Mat& h, double (*fn)(double)) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(h));
  RVec v = es.eigenvalues();
  for (int i = 0; i < v.size(); ++i) v(i) = fn(v(i));
  return es.eigenvectors() * v.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

double exp_half(double x) { return std::exp(0.5 * x); }
double exp_full(double x) { return std::exp(x); }

}  // namespace

std::pair<Mat, Mat> delta_k_identity(const Mat& h, const Mat& dh) {
  const int N = static_cast<int>(h.rows());
  Mat X = Mat::Zero(2 * N, 2 * N);
  X.topLeftCorner(N, N) = 0.5 * h;
  X.bottomRightCorner(N, N) = 0.5 * h;
  X.topRightCorner(N, N) = 0.5 * dh;
  const Mat E = X.exp();
  const Mat lhs = E.topRightCorner(N, N);
  const ModularSpectralData ms = modular_spectrum(hermitian_function(h, exp_full));
  const Mat k = hermitian_function(h, exp_half);
  const Mat rhs = k * modular_calculus(modular_g1, ms, dh);
  return {lhs, rhs};
}

std::pair<Mat, Mat> laplacian_k_identity(const Mat& h0, const std::vector<Mat>& h1, const std::vector<Mat>& h2,
                                         const RMat& g_inv) {
  const int N = static_cast<int>(h0.rows());
  const int d = static_cast<int>(h1.size());
  if (static_cast<int>(h2.size()) != d * d || g_inv.rows() != d)
    throw ValidationError("laplacian_k_identity: derivative data do not match the metric");

  // blocks indexed by the dual-number basis 1, e1, e2, e1 e2
  auto mixed = [&](int mu, int nu) {
    Mat X = Mat::Zero(4 * N, 4 * N);
    for (int b = 0; b < 4; ++b) X.block(b * N, b * N, N, N) = 0.5 * h0;
    X.block(1 * N, 0, N, N) = 0.5 * h1[mu];
    X.block(3 * N, 2 * N, N, N) = 0.5 * h1[mu];
    X.block(2 * N, 0, N, N) = 0.5 * h1[nu];
    X.block(3 * N, 1 * N, N, N) = 0.5 * h1[nu];
    X.block(3 * N, 0, N, N) = 0.5 * h2[static_cast<size_t>(mu) * d + nu];
    return Mat(X.exp().block(3 * N, 0, N, N));
  };
  Mat lhs = Mat::Zero(N, N), lap_h = Mat::Zero(N, N);
  for (int mu = 0; mu < d; ++mu)
    for (int nu = 0; nu < d; ++nu) {
      if (g_inv(mu, nu) == 0.0) continue;
      lhs -= g_inv(mu, nu) * mixed(mu, nu);
      lap_h -= g_inv(mu, nu) * h2[static_cast<size_t>(mu) * d + nu];
    }

  const ModularSpectralData ms = modular_spectrum(hermitian_function(h0, exp_full));
  const Mat k = hermitian_function(h0, exp_half);
  const ModularFn g2 = [](double, std::span<const double> y) { return modular_g2(y[0], y[1]); };
  Mat rhs = k * modular_calculus(modular_g1, ms, lap_h);
  for (int mu = 0; mu < d; ++mu)
    for (int nu = 0; nu < d; ++nu) {
      if (g_inv(mu, nu) == 0.0) continue;
      const Mat pair[2] = {h1[mu], h1[nu]};
      rhs -= g_inv(mu, nu) * k * modular_apply(g2, ms, identity(N), pair);
    }
  return {lhs, rhs};
}

CompositionResiduals composition_lemma_check(const Fn2M& f1, const Fn3M& f2, const Fn1M& g1, const Fn2M& g2,
                                             const Mat& u, std::span<const Mat> bs) {
  if (bs.size() != 3) throw ValidationError("composition_lemma_check: b_0, b_1, b_2 expected");
  const ModularSpectralData ms = modular_spectrum(u);
  const Mat k = ms.dec.apply([](double r) { return std::sqrt(r); });
  const Mat &b0 = bs[0], &b1 = bs[1], &b2 = bs[2];
  CompositionResiduals res;

  const ModularFn F1 = [&](double r0, std::span<const double> y) { return f1(r0, y[0]); };
  {
    const Mat one[1] = {Mat(k * modular_calculus(g1, ms, b1))};
    const Mat lhs = modular_apply(F1, ms, b0, one);
    const Mat raw[1] = {b1};
    const ModularFn R = [&](double r0, std::span<const double> y) { return std::sqrt(r0) * f1(r0, y[0]) * g1(y[0]); };
    res.first = max_abs(lhs - modular_apply(R, ms, b0, raw));
  }
  {
    Mat inner = Mat::Zero(ms.dec.N, ms.dec.N);
    for (int i = 0; i < ms.size(); ++i)
      for (int j = 0; j < ms.size(); ++j)
        inner += g2(ms.ratios[i], ms.ratios[j]) * k * ms.project(i, b1) * ms.project(j, b2);
    const Mat one[1] = {inner};
    const Mat lhs = modular_apply(F1, ms, b0, one);
    const Mat raw[2] = {b1, b2};
    const ModularFn R = [&](double r0, std::span<const double> y) {
      return std::sqrt(r0) * f1(r0, y[0] * y[1]) * g2(y[0], y[1]);
    };
    res.second = max_abs(lhs - modular_apply(R, ms, b0, raw));
  }
  {
    const ModularFn F2 = [&](double r0, std::span<const double> y) { return f2(r0, y[0], y[1]); };
    Mat lhs = Mat::Zero(ms.dec.N, ms.dec.N);
    for (int i = 0; i < ms.size(); ++i)
      for (int j = 0; j < ms.size(); ++j) {
        const Mat two[2] = {Mat(k * ms.project(i, b1)), Mat(k * ms.project(j, b2))};
        lhs += g2(ms.ratios[i], ms.ratios[j]) * modular_apply(F2, ms, b0, two);
      }
    const Mat raw[2] = {b1, b2};
    const ModularFn R = [&](double r0, std::span<const double> y) {
      return r0 * std::sqrt(y[0]) * f2(r0, y[0], y[1]) * g2(y[0], y[1]);
    };
    res.third = max_abs(lhs - modular_apply(R, ms, b0, raw));
  }
  return res;
}

// ----------------------------------------------------------------------------

namespace {

const GFunctions& g_two() {
  static const GFunctions g = g_generic(2);
  return g;
}

}  // namespace

double g_delta_ln_k(double r0, double y) {
  if (!(r0 > 0.0 && y > 0.0)) throw DomainError("g_delta_ln_k: arguments must be positive");
  return 2.0 * std::sqrt(r0) * nct2_fdk_stable(r0, r0 * y) * modular_g1(y);
}

ModularPair g_dlnk_dlnk(double r0, double y1, double y2) {
  if (!(r0 > 0.0 && y1 > 0.0 && y2 > 0.0)) throw DomainError("g_dlnk_dlnk: arguments must be positive");
  const double r1 = r0 * y1, r2 = r1 * y2;
  const double w = 4.0 * r0 * std::sqrt(y1) * modular_g1(y1) * modular_g1(y2);
  ModularPair p;
  p.metric = w * nct2_fg(g_two(), r0, r1, r2) - 4.0 * std::sqrt(r0) * nct2_fdk_stable(r0, r2) * modular_g2(y1, y2);
  p.antisym = w * nct2_ff(g_two(), r0, r1, r2);
  return p;
}

}  // namespace heatcoeff
