#pragma once

/*! \file
    \brief Universal spectral functions I_{alpha,k}.

    I_{alpha,k}(r_0..r_k) is the integral over the standard k-simplex of
    (r_0 + s_1 (r_1 - r_0) + ... + s_k (r_k - r_0))^{-alpha}. It equals the
    divided difference [r_0, ..., r_k] f of any f with f^{(k)}(x) = x^{-alpha},
    which is how \ref i_eval computes it. \ref i_recursive and
    \ref i_quadrature are independent routes kept as oracles.
*/

#include "heatcoeff/errors.hpp"

#include <cmath>
#include <span>
#include <string>
#include <vector>

namespace heatcoeff {

struct SimplexArgs {
  double alpha = 1.0;
  int k = 0;
  std::vector<double> rs;

  SimplexArgs() = default;
  SimplexArgs(double a, std::vector<double> r) : alpha(a), k(static_cast<int>(r.size()) - 1), rs(std::move(r)) {}

  //! Throws DomainError / ValidationError when the invariants fail.
  void validate() const;
};

/*! Confluence handling.

    Relative gaps below \c tau count as confluent. In \c strict mode such input is
    rejected; in \c confluent mode the continuous extension is returned. Nodes closer
    than \c merge are treated as exactly equal. */
struct GapPolicy {
  enum class Mode { confluent, strict };
  double tau = 1e-6;
  double merge = 1e-12;
  Mode mode = Mode::confluent;
};

//! Smallest |r_i - r_j| / max(r_i, r_j) over distinct pairs; +inf for one argument.
double min_relative_gap(std::span<const double> rs);

double i_base(double alpha, double r0);

double i_eval(const SimplexArgs& args, const GapPolicy& policy = {});

//! Shorthand: k is rs.size() - 1.
double i_eval(double alpha, std::span<const double> rs, const GapPolicy& policy = {});
inline double i_eval(double alpha, std::initializer_list<double> rs, const GapPolicy& policy = {}) {
  return i_eval(alpha, std::span<const double>(rs.begin(), rs.size()), policy);
}

//! (ln r0 - ln r1) / (r0 - r1), with value 1/r0 on the diagonal.
double i_one_one(double r0, double r1);

//! Partial sum of sum_n B_n x^n / n! divided by r1, x = ln r0 - ln r1, n < n_terms.
double i_bernoulli_series(double r0, double r1, int n_terms);

/*! Iterated Gauss-Legendre quadrature of the defining simplex integral, with adaptive
    panel bisection per coordinate. The innermost coordinate is integrated in closed form. Throws QuadratureError
    with the achieved estimate when \c rel_tol is not met. */
double i_quadrature(const SimplexArgs& args, double rel_tol = 1e-10);

/*! Literal recursion in (alpha, k) down to I_{alpha-k,0}, I_{0,k} or I_{1,1}.
    Needs pairwise distinct trailing arguments; reaching I_{1,k} with k >= 2 is a
    DomainError. Templated so that tests can run it in multiprecision. */
template <class Real>
Real i_recursive(const Real& alpha, std::vector<Real> rs) {
  using std::log;
  using std::pow;
  const int k = static_cast<int>(rs.size()) - 1;
  if (k < 0) throw ValidationError("i_recursive: empty argument list");
  if (k == 0) return pow(rs[0], -alpha);
  if (alpha == Real(0)) {
    Real f = 1;
    for (int i = 2; i <= k; ++i) f *= i;
    return Real(1) / f;
  }
  if (alpha == Real(1)) {
    if (k != 1) throw DomainError("i_recursive: I_{1,k} with k >= 2 is outside the recursion");
    if (rs[0] == rs[1]) return Real(1) / rs[0];
    return (log(rs[0]) - log(rs[1])) / (rs[0] - rs[1]);
  }
  const Real a = rs[k - 1], b = rs[k];
  if (a == b) throw DomainError("i_recursive: coincident trailing arguments");
  std::vector<Real> drop_prev(rs.begin(), rs.end() - 1);  // r_0 .. r_{k-1}
  std::vector<Real> drop_last(rs.begin(), rs.end() - 2);  // r_0 .. r_{k-2}, r_k
  drop_last.push_back(b);
  const Real am1 = alpha - 1;
  return (i_recursive(am1, drop_last) - i_recursive(am1, drop_prev)) / (am1 * (a - b));
}

/*! Function model for the divided-difference engine: f^{(k)} = x^{-alpha}.
    Antiderivatives of integer powers switch to the x^m (ln x - H_m) / m! family. */
struct PowerModel {
  double alpha;
  int k;
  void taylor(int n0, int count, double c, double* out) const;
  double radius(double c) const { return c; }
  double scale(double x) const { return std::abs(x); }
};

}  // namespace heatcoeff
