#pragma once

/*! \file
    \brief Confluence-safe divided differences.

    Nodes are sorted and grouped by single linkage. Inside a group the
    divided difference is summed as a Taylor series about the group centre,
    which stays exact to rounding however close (or equal) the nodes are.
    Across groups the usual two-point recurrence is used; its denominators are
    bounded below by the grouping threshold.
*/

#include "heatcoeff/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace heatcoeff {

/*!
  Requirements on the function model \c F:

  - <tt>void taylor(int n0, int count, double c, double* out) const</tt>
    writes f^{(n0+m)}(c)/(n0+m)! for m = 0 .. count-1;
  - <tt>double radius(double c) const</tt> is the distance from c to the
    nearest singularity (infinity for entire functions);
  - <tt>double scale(double x) const</tt> is the length used to decide whether
    two nodes are "close" (|x| for power laws, 1 for the exponential).
*/
struct DividedDifferenceOptions {
  double group_tol = 0.1;    // nodes closer than group_tol * scale share a Taylor group
  double merge_tol = 1e-12;  // nodes closer than merge_tol * scale are treated as equal
  int max_terms = 600;
};

namespace detail {

// h_m(y_0..y_n) for m = 0..M, complete homogeneous symmetric polynomials.
inline void complete_homogeneous(const double* y, int len, int M, std::vector<double>& h) {
  h.assign(M + 1, 0.0);
  h[0] = 1.0;
  for (int j = 0; j < len; ++j)
    for (int m = 1; m <= M; ++m) h[m] += y[j] * h[m - 1];
}

inline double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace detail

template <class F>
double taylor_group_dd(const F& f, const double* x, int len, const DividedDifferenceOptions& opt) {
  const int order = len - 1;
  double c = 0.0;
  for (int i = 0; i < len; ++i) c += x[i];
  c /= len;
  std::vector<double> y(len);
  double ymax = 0.0;
  for (int i = 0; i < len; ++i) {
    y[i] = x[i] - c;
    ymax = std::max(ymax, std::abs(y[i]));
  }
  if (ymax == 0.0) {
    double a;
    f.taylor(order, 1, c, &a);
    return a;
  }
  const double R = f.radius(c);
  if (ymax >= 0.9 * R)
    throw ConvergenceError("divided difference: Taylor group too wide for convergence radius");

  // Grow the term budget until the tail bound is negligible.
  int M = 16;
  std::vector<double> a, h;
  for (;;) {
    a.resize(M + 1);
    f.taylor(order, M + 1, c, a.data());
    detail::complete_homogeneous(y.data(), len, M, h);
    double sum = 0.0;
    for (int m = M; m >= 0; --m) sum += a[m] * h[m];
    // |h_m| <= C(m+order, order) ymax^m
    const double tail = std::abs(a[M]) * detail::binomial(M + order, order) * std::pow(ymax, M);
    if (tail <= 1e-18 * std::abs(sum) || tail == 0.0) return sum;
    if (M >= opt.max_terms)
      throw ConvergenceError("divided difference: Taylor series did not converge");
    M = std::min(2 * M, opt.max_terms);
  }
}

/*! Divided difference [x_0, ..., x_k] f of the function model \c f. Symmetric in the
    nodes; repeated nodes give Hermite (confluent) values. */
template <class F>
double divided_difference(std::vector<double> x, const F& f, const DividedDifferenceOptions& opt = {}) {
  const int n = static_cast<int>(x.size());
  if (n == 0) throw ValidationError("divided difference needs at least one node");
  std::sort(x.begin(), x.end());
  for (int i = 1; i < n; ++i)
    if (x[i] - x[i - 1] <= opt.merge_tol * f.scale(x[i])) x[i] = x[i - 1];

  std::vector<int> group(n, 0);
  for (int i = 1; i < n; ++i)
    group[i] = group[i - 1] + ((x[i] - x[i - 1]) > opt.group_tol * f.scale(x[i]) ? 1 : 0);
  if (group[n - 1] == 0) return taylor_group_dd(f, x.data(), n, opt);

  // dd[i][j] over the sorted node range i..j
  std::vector<double> dd(static_cast<size_t>(n) * n, 0.0);
  auto at = [&](int i, int j) -> double& { return dd[static_cast<size_t>(i) * n + j]; };
  for (int len = 1; len <= n; ++len) {
    for (int i = 0; i + len - 1 < n; ++i) {
      const int j = i + len - 1;
      if (group[i] == group[j])
        at(i, j) = taylor_group_dd(f, x.data() + i, len, opt);
      else
        at(i, j) = (at(i + 1, j) - at(i, j - 1)) / (x[j] - x[i]);
    }
  }
  return at(0, n - 1);
}

// ----------------------------------------------------------------------------
// function models

//! exp(lambda x)
struct ExpModel {
  double lambda = 1.0;
  void taylor(int n0, int count, double c, double* out) const {
    double v = std::exp(lambda * c);
    for (int i = 1; i <= n0; ++i) v *= lambda / i;
    for (int m = 0; m < count; ++m) {
      out[m] = v;
      v *= lambda / (n0 + m + 1);
    }
  }
  double radius(double) const { return std::numeric_limits<double>::infinity(); }
  double scale(double) const { return 1.0 / std::max(std::abs(lambda), 1e-300); }
};

}  // namespace heatcoeff
