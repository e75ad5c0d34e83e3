#include "heatcoeff/universal_functions.hpp"

#include "heatcoeff/divided_difference.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/bernoulli.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace heatcoeff {

void SimplexArgs::validate() const {
  if (k < 0) throw ValidationError("SimplexArgs: negative order k");
  if (static_cast<int>(rs.size()) != k + 1) {
    std::ostringstream os;
    os << "SimplexArgs: expected " << k + 1 << " arguments, got " << rs.size();
    throw ValidationError(os.str());
  }
  if (!std::isfinite(alpha)) throw ValidationError("SimplexArgs: non-finite alpha");
  for (double r : rs)
    if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("SimplexArgs: arguments must be positive and finite");
}

double min_relative_gap(std::span<const double> rs) {
  double g = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < rs.size(); ++i)
    for (size_t j = i + 1; j < rs.size(); ++j)
      g = std::min(g, std::abs(rs[i] - rs[j]) / std::max(std::abs(rs[i]), std::abs(rs[j])));
  return g;
}

double i_base(double alpha, double r0) {
  if (!(r0 > 0.0)) throw DomainError("i_base: r0 must be positive");
  return std::pow(r0, -alpha);
}

// ----------------------------------------------------------------------------

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// n-fold antiderivative of x^{-alpha}, evaluated at c > 0
double antiderivative(double alpha, int n, double c) {
  const double ar = std::round(alpha);
  const int ai = static_cast<int>(ar);
  if (alpha == ar && ai >= 1 && ai <= n) {
    double P = 1.0;
    for (int j = 1; j < ai; ++j) P *= (j - ai);
    const int m = n - ai;
    double H = 0.0;
    for (int j = 1; j <= m; ++j) H += 1.0 / j;
    return std::pow(c, m) * (std::log(c) - H) / (factorial(m) * P);
  }
  double P = 1.0;
  for (int j = 1; j <= n; ++j) P *= (j - alpha);
  return std::pow(c, n - alpha) / P;
}

}  // namespace

void PowerModel::taylor(int n0, int count, double c, double* out) const {
  int m = 0;
  for (; m < count && n0 + m < k; ++m) {
    const int i = n0 + m;
    out[m] = antiderivative(alpha, k - i, c) / factorial(i);
  }
  if (m == count) return;
  // i >= k: f^{(i)} = (-alpha)(-alpha-1)...(-alpha-(i-k)+1) c^{-alpha-(i-k)}
  int i = n0 + m;
  double a = std::pow(c, -alpha) / factorial(k);
  for (int j = k; j < i; ++j) a *= (-alpha - (j - k)) / (c * (j + 1));
  for (; m < count; ++m, ++i) {
    out[m] = a;
    a *= (-alpha - (i - k)) / (c * (i + 1));
  }
}

double i_eval(const SimplexArgs& args, const GapPolicy& policy) {
  args.validate();
  const int k = args.k;
  if (k == 0) return std::pow(args.rs[0], -args.alpha);
  if (args.alpha == 0.0) return 1.0 / factorial(k);
  if (policy.mode == GapPolicy::Mode::strict) {
    const double gap = min_relative_gap(args.rs);
    if (gap > policy.merge && gap < policy.tau) {
      std::ostringstream os;
      os << "i_eval: relative gap " << gap << " below threshold " << policy.tau << " in strict mode";
      throw ConfluenceError(os.str());
    }
  }
  // I is homogeneous of degree -alpha; normalise so the largest node is 1.
  const double lam = *std::max_element(args.rs.begin(), args.rs.end());
  std::vector<double> x(args.rs);
  for (double& v : x) v /= lam;
  DividedDifferenceOptions opt;
  opt.merge_tol = policy.merge;
  const double dd = divided_difference(std::move(x), PowerModel{args.alpha, k}, opt);
  return dd * std::pow(lam, -args.alpha);
}

double i_eval(double alpha, std::span<const double> rs, const GapPolicy& policy) {
  return i_eval(SimplexArgs(alpha, std::vector<double>(rs.begin(), rs.end())), policy);
}

double i_one_one(double r0, double r1) {
  if (!(r0 > 0.0) || !(r1 > 0.0)) throw DomainError("i_one_one: arguments must be positive");
  const double z = (r1 - r0) / r0;  // ln(r1/r0) = log1p(z)
  if (z == 0.0) return 1.0 / r0;
  return std::log1p(z) / (z * r0);
}

double i_bernoulli_series(double r0, double r1, int n_terms) {
  if (!(r0 > 0.0) || !(r1 > 0.0)) throw DomainError("i_bernoulli_series: arguments must be positive");
  if (n_terms < 1 || n_terms > 170) throw ValidationError("i_bernoulli_series: n_terms must lie in [1, 170]");
  const double x = std::log(r0) - std::log(r1);
  constexpr double two_pi = 6.283185307179586;
  if (std::abs(x) >= two_pi)
    throw ConvergenceError("i_bernoulli_series: |ln r0 - ln r1| outside the disc of convergence 2 pi");
  double sum = 1.0;
  double pw = 1.0;  // x^n / n!
  for (int n = 1; n < n_terms; ++n) {
    pw *= x / n;
    if (n == 1)
      sum += -0.5 * pw;
    else if (n % 2 == 0)
      sum += boost::math::bernoulli_b2n<double>(n / 2) * pw;
  }
  return sum / r1;
}

// ----------------------------------------------------------------------------

namespace {

// int_0^1 (1 + z s)^{-alpha} ds for z > -1
double phi_line(double alpha, double z) {
  if (std::abs(z) < 1e-8) return 1.0 - 0.5 * alpha * z + alpha * (alpha + 1.0) * z * z / 6.0;
  const double l = std::log1p(z);
  if (alpha == 1.0) return l / z;
  return std::expm1((1.0 - alpha) * l) / ((1.0 - alpha) * z);
}

// Iterated Gauss-Legendre over the simplex with adaptive panel bisection per coordinate.
// The last coordinate is integrated in closed form.
struct SimplexIntegrator {
  using Rule = boost::math::quadrature::gauss<double, 15>;
  const SimplexArgs& args;
  double level_tol;             // absolute budget for one call at any level
  int max_depth;
  std::vector<double> err;      // per level: largest error estimate of a single call

  double level(int j, double A, double T) {
    const double r0 = args.rs[0];
    if (j == args.k) {
      const double b = args.rs[j] - r0;
      return T * std::pow(A, -args.alpha) * phi_line(args.alpha, b * T / A);
    }
    if (T <= 0.0) return 0.0;
    const double dr = args.rs[j] - r0;
    auto f = [&, j, A, T](double s) { return level(j + 1, A + s * dr, T - s); };
    double e = 0.0;
    const double v = adapt(f, 0.0, T, Rule::integrate(f, 0.0, T), level_tol, 0, e);
    err[static_cast<size_t>(j)] = std::max(err[static_cast<size_t>(j)], e);
    return v;
  }

  template <class F>
  double adapt(const F& f, double a, double b, double coarse, double tol, int depth, double& e) {
    const double m = 0.5 * (a + b);
    const double left = Rule::integrate(f, a, m), right = Rule::integrate(f, m, b);
    const double fine = left + right;
    const double diff = std::abs(fine - coarse);
    if (diff <= tol || depth >= max_depth) {
      e += diff;
      return fine;
    }
    return adapt(f, a, m, left, 0.5 * tol, depth + 1, e) + adapt(f, m, b, right, 0.5 * tol, depth + 1, e);
  }
};

}  // namespace

double i_quadrature(const SimplexArgs& args, double rel_tol) {
  args.validate();
  if (!(rel_tol > 0.0) || rel_tol > 1e-4) throw ValidationError("i_quadrature: rel_tol must lie in (0, 1e-4]");
  if (args.k == 0) return std::pow(args.rs[0], -args.alpha);
  const size_t levels = static_cast<size_t>(args.k) + 1;
  // a crude pass fixes the absolute scale; the integrand is positive
  SimplexIntegrator rough{args, std::numeric_limits<double>::infinity(), 0, std::vector<double>(levels, 0.0)};
  const double scale = std::abs(rough.level(1, args.rs[0], 1.0));
  SimplexIntegrator it{args, rel_tol * scale / args.k, 40, std::vector<double>(levels, 0.0)};
  const double v = it.level(1, args.rs[0], 1.0);
  // an inner error integrates over a region of volume at most one
  double err = 0.0;
  for (double e : it.err) err += e;
  const double achieved = err / std::abs(v);
  if (!(achieved <= rel_tol) || !std::isfinite(v)) {
    std::ostringstream os;
    os << "i_quadrature: tolerance " << rel_tol << " not reached (estimate " << achieved << ")";
    throw QuadratureError(os.str(), achieved);
  }
  return v;
}

}  // namespace heatcoeff
