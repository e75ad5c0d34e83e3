#include "heatcoeff/spectral_calculus.hpp"

#include "heatcoeff/errors.hpp"
#include "heatcoeff/universal_functions.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace heatcoeff {

Mat SpectralDecomposition::projector(int i) const {
  const auto cols = basis.middleCols(offset[i], count[i]);
  return cols * cols.adjoint();
}

std::vector<Mat> SpectralDecomposition::projectors() const {
  std::vector<Mat> out;
  for (int i = 0; i < clusters(); ++i) out.push_back(projector(i));
  return out;
}

Mat SpectralDecomposition::reconstruct() const {
  return apply([](double r) { return r; });
}

Mat SpectralDecomposition::apply(const std::function<double(double)>& f) const {
  RVec diag(N);
  for (int i = 0; i < clusters(); ++i) diag.segment(offset[i], count[i]).setConstant(f(values[i]));
  return basis * diag.cast<cplx>().asDiagonal() * basis.adjoint();
}

SpectralDecomposition spectral_decompose(const Mat& u, double cluster_tol) {
  if (u.rows() != u.cols() || u.rows() == 0) throw ValidationError("spectral_decompose: u must be square");
  const double scale = std::max(max_abs(u), 1e-300);
  const double asym = max_abs(u - u.adjoint()) / scale;
  if (asym > 1e-10) {
    std::ostringstream os;
    os << "spectral_decompose: u is not Hermitian (relative asymmetry " << asym << ")";
    throw ValidationError(os.str());
  }
  if (!(cluster_tol >= 0.0)) throw ValidationError("spectral_decompose: negative cluster tolerance");
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(u));
  if (es.info() != Eigen::Success) throw EigenError("spectral_decompose: eigensolver failed");
  const RVec& ev = es.eigenvalues();
  if (ev(0) <= 0.0) {
    std::ostringstream os;
    os << "spectral_decompose: u is not positive definite (smallest eigenvalue " << ev(0) << ")";
    throw DomainError(os.str());
  }
  SpectralDecomposition dec;
  dec.N = static_cast<int>(u.rows());
  dec.cluster_tol = cluster_tol;
  dec.basis = es.eigenvectors();
  dec.eigenvalues = ev;
  const double radius = ev(dec.N - 1);
  int start = 0;
  for (int i = 1; i <= dec.N; ++i) {
    if (i == dec.N || ev(i) - ev(i - 1) > cluster_tol * radius) {
      dec.offset.push_back(start);
      dec.count.push_back(i - start);
      dec.values.push_back(ev.segment(start, i - start).mean());
      start = i;
    }
  }
  return dec;
}

// ----------------------------------------------------------------------------

double SpectralTable::at(std::span<const int> idx) const {
  size_t flat = 0;
  for (int c : idx) flat = flat * m + c;
  return data[flat];
}

SpectralTable tabulate(const SpectralFn& f, int k, const SpectralDecomposition& dec) {
  SpectralTable t;
  t.k = k;
  t.m = dec.clusters();
  size_t total = 1;
  for (int i = 0; i <= k; ++i) total *= t.m;
  t.data.resize(total);
  std::vector<int> idx(k + 1, 0);
  std::vector<double> rs(k + 1);
  for (size_t flat = 0; flat < total; ++flat) {
    size_t rem = flat;
    for (int i = k; i >= 0; --i) {
      idx[i] = static_cast<int>(rem % t.m);
      rem /= t.m;
    }
    for (int i = 0; i <= k; ++i) rs[i] = dec.values[idx[i]];
    const double v = f(rs);
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os << "spectral function is not finite at (";
      for (int i = 0; i <= k; ++i) os << (i ? ", " : "") << rs[i];
      os << ")";
      throw EvaluationError(os.str());
    }
    t.data[flat] = v;
  }
  return t;
}

Mat apply_rotated(const SpectralTable& table, const SpectralDecomposition& dec, std::span<const Mat> bt) {
  const int k = table.k;
  const int m = table.m;
  const int N = dec.N;
  if (static_cast<int>(bt.size()) != k) throw ValidationError("sandwich: number of factors does not match arity");
  Mat result = Mat::Zero(N, N);
  if (k == 0) {
    for (int c = 0; c < m; ++c) {
      const int ci[1] = {c};
      result.diagonal().segment(dec.offset[c], dec.count[c]).setConstant(table.at(ci));
    }
    return result;
  }
  std::vector<int> idx(k + 1, 0);
  int interior = 1;
  for (int i = 1; i < k; ++i) interior *= m;
  for (int t = 0; t < interior; ++t) {
    int rem = t;
    for (int i = k - 1; i >= 1; --i) {
      idx[i] = rem % m;
      rem /= m;
    }
    Mat X = bt[0];
    for (int i = 1; i < k; ++i) {
      const int c = idx[i];
      X = X.middleCols(dec.offset[c], dec.count[c]) * bt[i].middleRows(dec.offset[c], dec.count[c]);
    }
    for (int c0 = 0; c0 < m; ++c0)
      for (int ck = 0; ck < m; ++ck) {
        idx[0] = c0;
        idx[k] = ck;
        const double f = table.at(idx);
        if (f == 0.0) continue;
        result.block(dec.offset[c0], dec.offset[ck], dec.count[c0], dec.count[ck]) +=
            f * X.block(dec.offset[c0], dec.offset[ck], dec.count[c0], dec.count[ck]);
      }
  }
  return result;
}

Mat apply(const SpectralTable& table, const SpectralDecomposition& dec, std::span<const Mat> bs) {
  std::vector<Mat> bt;
  bt.reserve(bs.size());
  for (const Mat& b : bs) bt.push_back(dec.rotate_in(b));
  return dec.rotate_out(apply_rotated(table, dec, bt));
}

Mat sandwich_sum(const SpectralFn& f, const SpectralDecomposition& dec, std::span<const Mat> bs) {
  const SpectralTable t = tabulate(f, static_cast<int>(bs.size()), dec);
  return apply(t, dec, bs);
}

// ----------------------------------------------------------------------------

namespace {

// sum over pairings of prod g_{i j}, times 2^{-p}
double pairing_sum(const RMat& g, std::vector<int>& idx) {
  if (idx.empty()) return 1.0;
  const int first = idx[0];
  double s = 0.0;
  for (size_t j = 1; j < idx.size(); ++j) {
    const int partner = idx[j];
    std::vector<int> rest;
    rest.reserve(idx.size() - 2);
    for (size_t l = 1; l < idx.size(); ++l)
      if (l != j) rest.push_back(idx[l]);
    s += 0.5 * g(first, partner) * pairing_sum(g, rest);
  }
  return s;
}

}  // namespace

double GaussianMoments::component(std::span<const int> idx) const {
  const size_t p = idx.size() / 2;
  size_t flat = 0;
  for (int i : idx) flat = flat * d + i;
  return tensors.at(p).at(flat);
}

GaussianMoments gaussian_moments(const RMat& g_inv, int p_max) {
  if (g_inv.rows() != g_inv.cols()) throw ValidationError("gaussian_moments: metric must be square");
  Eigen::SelfAdjointEigenSolver<RMat> es(g_inv);
  if (es.eigenvalues().minCoeff() <= 0.0) throw DomainError("gaussian_moments: metric is not positive definite");
  GaussianMoments gm;
  gm.d = static_cast<int>(g_inv.rows());
  gm.g_lower = g_inv.inverse();
  const double detg = gm.g_lower.determinant();
  gm.g_d = std::sqrt(detg) / (std::pow(2.0, gm.d) * std::pow(M_PI, gm.d / 2.0));
  for (int p = 0; p <= p_max; ++p) {
    size_t total = 1;
    for (int i = 0; i < 2 * p; ++i) total *= gm.d;
    std::vector<double> t(total);
    std::vector<int> idx(2 * p);
    for (size_t flat = 0; flat < total; ++flat) {
      size_t rem = flat;
      for (int i = 2 * p - 1; i >= 0; --i) {
        idx[i] = static_cast<int>(rem % gm.d);
        rem /= gm.d;
      }
      std::vector<int> work = idx;
      t[flat] = pairing_sum(gm.g_lower, work);
    }
    gm.tensors.push_back(std::move(t));
  }
  return gm;
}

Mat t_kp_apply(int k, int p, const SpectralDecomposition& dec, const GaussianMoments& moments,
               const TensorArgument& arg) {
  if (k < 0 || p < 0 || p >= static_cast<int>(moments.tensors.size()))
    throw ValidationError("t_kp_apply: moments do not cover the requested rank");
  const double alpha = moments.d / 2.0 + p;
  const SpectralTable table =
      tabulate([alpha](std::span<const double> rs) { return i_eval(alpha, rs); }, k, dec);
  const int d = moments.d;
  size_t total = 1;
  for (int i = 0; i < 2 * p; ++i) total *= d;
  Mat result = Mat::Zero(dec.N, dec.N);
  std::vector<int> idx(2 * p);
  for (size_t flat = 0; flat < total; ++flat) {
    size_t rem = flat;
    for (int i = 2 * p - 1; i >= 0; --i) {
      idx[i] = static_cast<int>(rem % d);
      rem /= d;
    }
    const double G = moments.component(idx);
    if (G == 0.0) continue;
    const std::vector<Mat> bs = arg(idx);
    if (static_cast<int>(bs.size()) != k + 1) throw ValidationError("t_kp_apply: argument must supply k+1 factors");
    result += G * (bs[0] * apply(table, dec, std::span<const Mat>(bs).subspan(1)));
  }
  return moments.g_d * result;
}

}  // namespace heatcoeff
