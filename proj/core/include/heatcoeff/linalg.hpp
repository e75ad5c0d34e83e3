#pragma once

/*! \file
    \brief Matrix aliases and small dense helpers used throughout the library.
*/

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <random>

namespace heatcoeff {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline Mat identity(int n) { return Mat::Identity(n, n); }

inline Mat commutator(const Mat& a, const Mat& b) { return a * b - b * a; }

inline Mat hermitian_part(const Mat& a) { return 0.5 * (a + a.adjoint()); }

//! Largest absolute entry; zero for empty matrices.
inline double max_abs(const Mat& a) { return a.size() ? a.cwiseAbs().maxCoeff() : 0.0; }

inline double rel_diff(const Mat& a, const Mat& b) {
  const double scale = std::max({max_abs(a), max_abs(b), 1e-300});
  return max_abs(a - b) / scale;
}

//! Deterministic generator used by tests, benchmarks and the self-test battery.
using Rng = std::mt19937_64;

inline Mat random_matrix(int n, Rng& rng, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  Mat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = cplx(nd(rng), nd(rng));
  return m;
}

inline Mat random_hermitian(int n, Rng& rng, double scale = 1.0) {
  return hermitian_part(random_matrix(n, rng, scale));
}

inline Mat random_antihermitian(int n, Rng& rng, double scale = 1.0) {
  const Mat m = random_matrix(n, rng, scale);
  return 0.5 * (m - m.adjoint());
}

//! Positive definite matrix with spectrum inside [lo, hi].
inline Mat random_positive(int n, Rng& rng, double lo = 0.5, double hi = 3.0) {
  std::uniform_real_distribution<double> ud(lo, hi);
  Eigen::HouseholderQR<Mat> qr(random_matrix(n, rng));
  const Mat q = qr.householderQ();
  RVec ev(n);
  for (int i = 0; i < n; ++i) ev(i) = ud(rng);
  return q * ev.cast<cplx>().asDiagonal() * q.adjoint();
}

}  // namespace heatcoeff
