#include "heatcoeff/divided_difference.hpp"
#include "heatcoeff/linalg.hpp"
#include "heatcoeff/universal_functions.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace heatcoeff;

namespace {
double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }
const double e = std::numbers::e;
}  // namespace

TEST_CASE("i_base is a power law") {
  CHECK(i_base(1.0, 1.0) == 1.0);
  CHECK(i_base(2.0, 2.0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(i_base(0.5, 4.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(i_base(1.0, 0.0), DomainError);
}

TEST_CASE("i_eval reference values") {
  CHECK(rel(i_eval(2.0, {2.0, 3.0}), 1.0 / 6.0) < 1e-14);
  for (double r : {0.3, 1.0, 2.5}) CHECK(rel(i_eval(3.0, {r, r, r}), std::pow(r, -3.0) / 2.0) < 1e-14);
  CHECK(rel(i_eval(1.0, {1.0, e}), 1.0 / (e - 1.0)) < 1e-14);
  CHECK(i_eval(1.0, {1.0, e}) == doctest::Approx(0.581977).epsilon(1e-6));
  CHECK(rel(i_eval(3.0, {1.0, 1.0, 1.0, 1.0}), 1.0 / 6.0) < 1e-14);
}

TEST_CASE("i_eval at equal arguments is r^-alpha / k!") {
  for (double alpha : {1.0, 1.5, 2.0, 3.5, 6.0})
    for (int k = 0; k <= 4; ++k) {
      const std::vector<double> rs(k + 1, 1.37);
      CHECK(rel(i_eval(alpha, rs), std::pow(1.37, -alpha) / std::tgamma(k + 1.0)) < 1e-13);
    }
}

TEST_CASE("i_one_one reference values") {
  CHECK(i_one_one(1.0, 1.0) == 1.0);
  CHECK(rel(i_one_one(1.0, e), 1.0 / (e - 1.0)) < 1e-15);
  CHECK(rel(i_one_one(4.0, 1.0), std::log(4.0) / 3.0) < 1e-15);
  CHECK(i_one_one(4.0, 1.0) == doctest::Approx(0.462098).epsilon(1e-6));
  CHECK_THROWS_AS(i_one_one(-1.0, 1.0), DomainError);
}

TEST_CASE("Bernoulli series") {
  for (int n : {1, 5, 40}) CHECK(rel(i_bernoulli_series(5.0, 5.0, n), 0.2) < 1e-15);
  CHECK(rel(i_bernoulli_series(1.0, e, 40), 1.0 / (e - 1.0)) < 1e-12);
  // x = 2 with ten terms: the error is governed by the first omitted term B_10 x^10 / 10!
  const double next = (5.0 / 66.0) * std::pow(2.0, 10) / 3628800.0;
  CHECK(std::abs(i_bernoulli_series(e * e, 1.0, 10) - i_one_one(e * e, 1.0)) < 2.0 * next);
  CHECK(std::abs(i_bernoulli_series(std::exp(0.5), 1.0, 10) - i_one_one(std::exp(0.5), 1.0)) < 1e-6);
  CHECK_THROWS_AS(i_bernoulli_series(std::exp(7.0), 1.0, 10), ConvergenceError);
}

TEST_CASE("quadrature oracle reference values") {
  CHECK(std::abs(i_quadrature(SimplexArgs(2.0, {2.0, 3.0})) - 1.0 / 6.0) < 1e-10);
  CHECK(rel(i_quadrature(SimplexArgs(1.0, {1.0, 4.0})), std::log(4.0) / 3.0) < 1e-10);
  CHECK(rel(i_quadrature(SimplexArgs(3.0, {1.0, 1.0, 1.0, 1.0})), 1.0 / 6.0) < 1e-10);
  CHECK_THROWS_AS(i_quadrature(SimplexArgs(2.0, {1.0, 2.0}), 1e-2), ValidationError);
}

TEST_CASE("i_eval agrees with quadrature and with the recursion") {
  Rng rng(11);
  std::uniform_real_distribution<double> ur(0.2, 4.0);
  std::uniform_int_distribution<int> uk(1, 4), ua(2, 12);
  using big = boost::multiprecision::cpp_bin_float_50;
  for (int t = 0; t < 60; ++t) {
    const double alpha = 0.5 * ua(rng);
    std::vector<double> rs(uk(rng) + 1);
    for (double& r : rs) r = ur(rng);
    const double v = i_eval(alpha, rs);
    CHECK(rel(v, i_quadrature(SimplexArgs(alpha, rs))) < 1e-8);
    // the recursion needs integer steps that avoid I_{1,k}, k >= 2
    const double steps = alpha - static_cast<double>(rs.size() - 1);
    if (alpha > 1.0 && (steps > 1.0 || steps != std::round(steps))) {
      std::vector<big> rb(rs.begin(), rs.end());
      CHECK(rel(v, static_cast<double>(i_recursive(big(alpha), rb))) < 1e-12);
    }
  }
}

TEST_CASE("i_eval is symmetric and homogeneous") {
  Rng rng(5);
  std::uniform_real_distribution<double> ur(0.2, 4.0);
  for (int t = 0; t < 30; ++t) {
    std::vector<double> rs{ur(rng), ur(rng), ur(rng), ur(rng)};
    const double v = i_eval(2.5, rs);
    std::vector<double> p = rs;
    std::reverse(p.begin(), p.end());
    CHECK(rel(i_eval(2.5, p), v) < 1e-13);
    std::vector<double> s = rs;
    for (double& x : s) x *= 3.0;
    CHECK(rel(i_eval(2.5, s), std::pow(3.0, -2.5) * v) < 1e-13);
  }
}

TEST_CASE("confluent arguments are continuous") {
  const double limit = i_eval(2.0, {1.5, 1.5, 2.0});
  for (double gap : {1e-3, 1e-6, 1e-9, 1e-12, 1e-15}) {
    const double v = i_eval(2.0, {1.5, 1.5 * (1.0 + gap), 2.0});
    CHECK(std::isfinite(v));
    CHECK(std::abs(v - limit) < 10.0 * gap + 1e-14);
  }
}

TEST_CASE("gap policy") {
  GapPolicy strict;
  strict.mode = GapPolicy::Mode::strict;
  CHECK_THROWS_AS(i_eval(2.0, {1.0, 1.0 + 1e-8}, strict), ConfluenceError);
  CHECK_NOTHROW(i_eval(2.0, {1.0, 1.0}, strict));
  CHECK_NOTHROW(i_eval(2.0, {1.0, 2.0}, strict));
  CHECK(min_relative_gap(std::vector<double>{1.0, 2.0, 4.0}) == doctest::Approx(0.5));
}

TEST_CASE("argument validation") {
  CHECK_THROWS_AS(SimplexArgs(1.0, {1.0, -1.0}).validate(), DomainError);
  SimplexArgs bad(1.0, {1.0, 2.0});
  bad.k = 3;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  CHECK_THROWS_AS(i_eval(std::nan(""), {1.0}), ValidationError);
}

TEST_CASE("divided differences of the exponential") {
  // [x0, x1, x2] exp = sum_i e^{x_i} / prod_{j != i}(x_i - x_j)
  const std::vector<double> x{0.1, 0.7, 1.6};
  double ref = 0.0;
  for (int i = 0; i < 3; ++i) {
    double den = 1.0;
    for (int j = 0; j < 3; ++j)
      if (j != i) den *= x[i] - x[j];
    ref += std::exp(x[i]) / den;
  }
  CHECK(rel(divided_difference(x, ExpModel{1.0}), ref) < 1e-13);
  CHECK(rel(divided_difference({0.3, 0.3, 0.3}, ExpModel{1.0}), std::exp(0.3) / 2.0) < 1e-14);
}
