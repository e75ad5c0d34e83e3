#pragma once

/*! \file
    \brief Second-order jets: a value with its first and second partial derivatives
    at one chart point.

    Jets carry an \c order (0, 1 or 2). Arithmetic keeps the smallest order of its
    operands, and \ref partial lowers it by one, so derivatives of derived
    quantities (Christoffel symbols, converted operator fields) are exact.
*/

#include "heatcoeff/linalg.hpp"

#include <algorithm>
#include <vector>

namespace heatcoeff {

inline double zero_like(double) { return 0.0; }
inline Mat zero_like(const Mat& m) { return Mat::Zero(m.rows(), m.cols()); }

template <class T>
struct Jet {
  int dim = 0;
  int order = 0;
  T v{};
  std::vector<T> d;   // d[mu]
  std::vector<T> dd;  // dd[mu * dim + nu], symmetric

  Jet() = default;
  Jet(const T& value, int dim_, int order_) : dim(dim_), order(order_), v(value) {
    if (order >= 1) d.assign(dim, zero_like(value));
    if (order >= 2) dd.assign(static_cast<size_t>(dim) * dim, zero_like(value));
  }

  const T& dd_at(int mu, int nu) const { return dd[static_cast<size_t>(mu) * dim + nu]; }
  T& dd_at(int mu, int nu) { return dd[static_cast<size_t>(mu) * dim + nu]; }

  //! Drops derivative data above \c new_order.
  Jet truncated(int new_order) const {
    Jet r = *this;
    r.order = std::min(order, new_order);
    if (r.order < 2) r.dd.clear();
    if (r.order < 1) r.d.clear();
    return r;
  }
};

using RJet = Jet<double>;
using MatJet = Jet<Mat>;

//! The jet of partial_mu f, one order lower.
template <class T>
Jet<T> partial(const Jet<T>& f, int mu) {
  Jet<T> r;
  r.dim = f.dim;
  r.order = f.order - 1;
  r.v = f.d.at(mu);
  if (r.order >= 1) {
    r.d.resize(f.dim);
    for (int nu = 0; nu < f.dim; ++nu) r.d[nu] = f.dd_at(mu, nu);
  }
  return r;
}

template <class T>
Jet<T> operator+(const Jet<T>& a, const Jet<T>& b) {
  Jet<T> r;
  r.dim = a.dim;
  r.order = std::min(a.order, b.order);
  r.v = a.v + b.v;
  if (r.order >= 1) {
    r.d.resize(a.dim);
    for (int m = 0; m < a.dim; ++m) r.d[m] = a.d[m] + b.d[m];
  }
  if (r.order >= 2) {
    r.dd.resize(a.dd.size());
    for (size_t i = 0; i < a.dd.size(); ++i) r.dd[i] = a.dd[i] + b.dd[i];
  }
  return r;
}

template <class T, class S>
Jet<T> scaled(const Jet<T>& a, const S& s) {
  Jet<T> r = a;
  r.v = s * a.v;
  for (auto& x : r.d) x = s * x;
  for (auto& x : r.dd) x = s * x;
  return r;
}

template <class T>
Jet<T> operator-(const Jet<T>& a) {
  return scaled(a, -1.0);
}

template <class T>
Jet<T> operator-(const Jet<T>& a, const Jet<T>& b) {
  return a + (-b);
}

namespace detail {
template <class A, class B> struct JetProduct { using type = Mat; };
template <> struct JetProduct<double, double> { using type = double; };
}  // namespace detail

//! Leibniz rule through second order; works for scalar/matrix mixes.
template <class A, class B>
auto operator*(const Jet<A>& a, const Jet<B>& b) {
  using R = typename detail::JetProduct<A, B>::type;
  Jet<R> r;
  r.dim = a.dim;
  r.order = std::min(a.order, b.order);
  r.v = a.v * b.v;
  if (r.order >= 1) {
    r.d.resize(a.dim);
    for (int m = 0; m < a.dim; ++m) r.d[m] = a.d[m] * b.v + a.v * b.d[m];
  }
  if (r.order >= 2) {
    r.dd.resize(static_cast<size_t>(a.dim) * a.dim);
    for (int m = 0; m < a.dim; ++m)
      for (int n = 0; n < a.dim; ++n)
        r.dd_at(m, n) = a.dd_at(m, n) * b.v + a.d[m] * b.d[n] + a.d[n] * b.d[m] + a.v * b.dd_at(m, n);
  }
  return r;
}

inline MatJet commutator(const MatJet& a, const MatJet& b) { return a * b - b * a; }

//! Promotes a real jet to a multiple of the n x n identity.
inline MatJet to_matrix_jet(const RJet& s, int n) {
  MatJet r(identity(n) * s.v, s.dim, s.order);
  for (size_t i = 0; i < s.d.size(); ++i) r.d[i] = identity(n) * s.d[i];
  for (size_t i = 0; i < s.dd.size(); ++i) r.dd[i] = identity(n) * s.dd[i];
  return r;
}

//! Jet of the inverse matrix: d(G) = -G dg G, dd(G) = G (dg G dg + dg G dg - ddg) G.
inline MatJet inverse(const MatJet& g) {
  const Mat G = g.v.inverse();
  MatJet r(G, g.dim, g.order);
  if (g.order >= 1)
    for (int m = 0; m < g.dim; ++m) r.d[m] = -G * g.d[m] * G;
  if (g.order >= 2)
    for (int m = 0; m < g.dim; ++m)
      for (int n = 0; n < g.dim; ++n)
        r.dd_at(m, n) = G * (g.d[m] * G * g.d[n] + g.d[n] * G * g.d[m] - g.dd_at(m, n)) * G;
  return r;
}

/*! Jet of a real symmetric matrix stored as d*d entry jets (row-major), inverted.
    Used for the metric g_{mu nu} from g^{mu nu}. */
std::vector<RJet> inverse_entries(const std::vector<RJet>& entries, int n);

//! Second-order polynomial jet around the origin, evaluated at offset x (for tests).
template <class T>
T taylor_value(const Jet<T>& j, const std::vector<double>& x) {
  T r = j.v;
  if (j.order >= 1)
    for (int m = 0; m < j.dim; ++m) r = r + x[m] * j.d[m];
  if (j.order >= 2)
    for (int m = 0; m < j.dim; ++m)
      for (int n = 0; n < j.dim; ++n) r = r + 0.5 * x[m] * x[n] * j.dd_at(m, n);
  return r;
}

}  // namespace heatcoeff
