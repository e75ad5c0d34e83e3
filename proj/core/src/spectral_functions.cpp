#include "heatcoeff/spectral_functions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace heatcoeff {

double i_value(double alpha, std::span<const double> rs, const SpectralOptions& opt) {
  if (rs.size() == 1) return i_base(alpha, rs[0]);
  if (opt.backend == IBackend::quadrature)
    return i_quadrature(SimplexArgs(alpha, std::vector<double>(rs.begin(), rs.end())), opt.quad_tol);
  return i_eval(alpha, rs, opt.policy);
}

namespace {

struct IForm {
  double a0;  // d / 2
  SpectralOptions opt;
  double operator()(int p, std::initializer_list<double> rs) const { return i_value(a0 + p, rs, opt); }
};

}  // namespace

FFunctions f_generic(int d, const SpectralOptions& opt) {
  if (d < 1) throw ValidationError("f_generic: dimension must be positive");
  const IForm I{0.5 * d, opt};
  const double dd = d;
  FFunctions f;
  f.d = d;
  f.w = [I](double r0, double r1) { return I(0, {r0, r1}); };
  f.dv = [I](double r0, double r1) { return -r0 * I(1, {r0, r0, r1}); };
  f.ddu = [I, dd](double r0, double r1) {
    return -0.5 * dd * r0 * I(1, {r0, r0, r1}) + (dd + 2) * r0 * r0 * I(2, {r0, r0, r0, r1});
  };
  f.du = [I, dd](double r0, double r1) {
    const double x1 = r0 * I(1, {r0, r0, r1});
    const double x2 = r0 * r0 * I(2, {r0, r0, r0, r1});
    const double x3 = r0 * r1 * I(2, {r0, r0, r1, r1});
    const double x4 = 3 * r0 * r0 * r0 * I(3, {r0, r0, r0, r0, r1}) +
                      2 * r0 * r0 * r1 * I(3, {r0, r0, r0, r1, r1}) + r0 * r1 * r1 * I(3, {r0, r0, r1, r1, r1});
    GeoCoeffs c;
    c.alpha = -x1 + 0.5 * (dd + 6) * x2 + 0.5 * (dd + 4) * x3 - 0.5 * (dd + 4) * x4;
    c.beta = (dd + 6) * x2 + 2 * x3 - (dd + 4) * x4;
    return c;
  };
  f.v = [I](double r0, double r1) {
    const double y1 = r1 * I(1, {r0, r1, r1});
    const double y2 = r1 * r1 * I(2, {r0, r1, r1, r1}) + r0 * r1 * I(2, {r0, r0, r1, r1}) +
                      r0 * r0 * I(2, {r0, r0, r0, r1});
    return GeoCoeffs{-0.5 * y1 + 0.5 * y2, y2};
  };
  f.vv = [I](double r0, double r1, double r2) { return -0.5 * I(1, {r0, r1, r2}); };
  f.duv = [I, dd](double r0, double r1, double r2) { return 0.5 * (dd + 2) * r0 * I(2, {r0, r0, r1, r2}); };
  f.vdu = [I, dd](double r0, double r1, double r2) {
    return -0.5 * dd * I(1, {r0, r1, r2}) + 0.5 * (dd + 2) * r1 * I(2, {r0, r1, r1, r2}) +
           0.5 * (dd + 2) * r0 * I(2, {r0, r0, r1, r2});
  };
  f.dudu = [I, dd](double r0, double r1, double r2) {
    return 0.5 * (dd + 2) * (dd + 2) * r0 * I(2, {r0, r0, r1, r2}) -
           0.5 * (dd + 4) * (dd + 2) *
               (2 * r0 * r0 * I(3, {r0, r0, r0, r1, r2}) + r0 * r1 * I(3, {r0, r0, r1, r1, r2}));
  };
  return f;
}

FFunctions f_reduced(int d, const SpectralOptions& opt) {
  if (d < 1) throw ValidationError("f_reduced: dimension must be positive");
  const double a0 = 0.5 * d;
  const double dd = d;
  auto I = [a0, opt](double r0, double r1) { return i_value(a0, {r0, r1}, opt); };
  auto I00 = [a0](double r0) { return std::pow(r0, -a0); };
  FFunctions f;
  f.d = d;
  f.w = I;
  f.dv = [=](double r0, double r1) { return 2 * r0 * (I00(r0) - I(r0, r1)) / (dd * (r0 - r1)); };
  auto x = [=](double r0, double r1) {
    return r0 * (4 * r0 * I00(r0) + ((dd - 4) * r0 - dd * r1) * I(r0, r1)) / (dd * (r0 - r1) * (r0 - r1));
  };
  f.ddu = [=](double r0, double r1) { return -x(r0, r1); };
  f.du = [=](double r0, double r1) {
    const double v = x(r0, r1);
    return GeoCoeffs{0.5 * v, -v};
  };
  f.v = [=](double r0, double r1) {
    const double i01 = I(r0, r1);
    return GeoCoeffs{-r0 * (I00(r0) - i01) / (dd * (r0 - r1)) - 0.25 * i01, 0.5 * i01};
  };
  f.vv = [=](double r0, double r1, double r2) { return (I(r0, r1) - I(r0, r2)) / (dd * (r1 - r2)); };
  f.duv = [=](double r0, double r1, double r2) {
    return 2 * r0 / dd *
           (I00(r0) / ((r0 - r1) * (r0 - r2)) + I(r0, r1) / ((r1 - r0) * (r1 - r2)) +
            I(r0, r2) / ((r2 - r0) * (r2 - r1)));
  };
  f.vdu = [=](double r0, double r1, double r2) {
    const double c = (dd - 4) * r0 * r1 - (dd - 2) * r0 * r2 - (dd - 2) * r1 * r2 + dd * r2 * r2;
    return -2 * r0 * I00(r0) / (dd * (r0 - r2) * (r1 - r2)) - 2 * r1 * I(r0, r1) / (dd * (r1 - r2) * (r1 - r2)) -
           c * I(r0, r2) / (dd * (r0 - r2) * (r1 - r2) * (r1 - r2));
  };
  f.dudu = [=](double r0, double r1, double r2) {
    const double pre = 4 * r0 / (dd * (r0 - r1) * (r0 - r2) * (r0 - r2) * (r1 - r2) * (r1 - r2));
    const double c = (dd - 4) * r0 * r1 - (dd - 2) * r0 * r2 - dd * r1 * r2 + (dd + 2) * r2 * r2;
    return pre * (r0 * (r1 - r2) * (r0 - 2 * r1 + r2) * I00(r0) + r1 * (r0 - r2) * (r0 - r2) * I(r0, r1) +
                  0.5 * (r0 - r1) * c * I(r0, r2));
  };
  return f;
}

GFunctions g_from_f(const FFunctions& f) {
  GFunctions g;
  g.d = f.d;
  g.q = f.w;
  g.ddu = [f](double r0, double r1) { return f.ddu(r0, r1) + f.dv(r0, r1); };
  g.dp = f.dv;
  g.dudu = [f](double r0, double r1, double r2) {
    return f.dudu(r0, r1, r2) + f.vdu(r0, r1, r2) + f.duv(r0, r1, r2) + f.vv(r0, r1, r2);
  };
  g.pdu = [f](double r0, double r1, double r2) { return f.vdu(r0, r1, r2) + f.vv(r0, r1, r2); };
  g.dup = [f](double r0, double r1, double r2) { return f.duv(r0, r1, r2) + f.vv(r0, r1, r2); };
  g.pp = f.vv;
  return g;
}

// ----------------------------------------------------------------------------
// closed forms

double Q1(double a, double b, double c) {
  const double num = -3 * a * a * a + a * a * b - 6 * a * a * c + 6 * a * b * c + a * c * c + b * c * c;
  return num / (2 * (a - b) * (a - b) * std::pow(a - c, 3));
}

double Q2(double a, double b, double c) {
  const double la = std::log(a), lb = std::log(b), lc = std::log(c);
  return 0.5 * (2 / ((a - b) * (a - c)) +
                ((a + b) * (a + c) - 4 * a * a) / ((a - b) * (a - b) * (a - c) * (a - c)) * la +
                (a + b) / ((b - a) * (b - a) * (b - c)) * lb + (a + c) / ((c - a) * (c - a) * (c - b)) * lc);
}

double Q3(double a, double b, double c) {
  const double sa = std::sqrt(a), sb = std::sqrt(b), sc = std::sqrt(c);
  return 6 * std::sqrt(a * b * c) + a * sa + 2 * b * sb + c * sc + std::sqrt(a * c) * (sa + sc) +
         2 * (a * (sb + sc) + 2 * b * (sa + sc) + c * (sa + sb));
}

double Q4(double a, double b, double c) {
  const double sa = std::sqrt(a), sb = std::sqrt(b), sc = std::sqrt(c);
  const double num = a + b + c + 2 * sa * sb + 2 * sa * sc + sb * sc;
  return num / (sb * sc * (sa + sb) * (sa + sb) * (sa + sc) * (sa + sc) * (sb + sc));
}

GFunctions g_closed_d2_raw() {
  GFunctions g;
  g.d = 2;
  g.q = [](double r0, double r1) { return i_one_one(r0, r1); };
  g.dp = [](double r0, double r1) { return (1 - r0 * i_one_one(r0, r1)) / (r0 - r1); };
  g.ddu = [](double r0, double r1) {
    return -(r0 + r1 - 2 * r0 * r1 * i_one_one(r0, r1)) / ((r0 - r1) * (r0 - r1));
  };
  g.dudu = [](double r0, double r1, double r2) {
    return (r0 + r2) * (r0 - 2 * r1 + r2) / ((r0 - r1) * (r0 - r2) * (r0 - r2) * (r1 - r2)) -
           Q1(r0, r1, r2) * std::log(r0) -
           (r0 + r1) * (r1 + r2) / (2 * (r0 - r1) * (r0 - r1) * (r1 - r2) * (r1 - r2)) * std::log(r1) -
           Q1(r2, r1, r0) * std::log(r2);
  };
  g.dup = [](double r0, double r1, double r2) { return Q2(r0, r1, r2); };
  g.pdu = [](double r0, double r1, double r2) { return -Q2(r2, r1, r0); };
  g.pp = [](double r0, double r1, double r2) {
    return 0.5 * (std::log(r0) / ((r0 - r1) * (r0 - r2)) + std::log(r1) / ((r1 - r0) * (r1 - r2)) +
                  std::log(r2) / ((r2 - r0) * (r2 - r1)));
  };
  return g;
}

GFunctions g_closed_d3() {
  GFunctions g;
  g.d = 3;
  g.q = [](double r0, double r1) {
    const double a = std::sqrt(r0), b = std::sqrt(r1);
    return 2 / (a * b * (a + b));
  };
  g.dp = [](double r0, double r1) {
    const double a = std::sqrt(r0), b = std::sqrt(r1);
    return -2.0 / 3.0 * (2 * a + b) / (a * b * (a + b) * (a + b));
  };
  g.ddu = [](double r0, double r1) {
    const double a = std::sqrt(r0), b = std::sqrt(r1);
    return -2.0 / 3.0 * (a * b + (a + b) * (a + b)) / (a * b * std::pow(a + b, 3));
  };
  g.dudu = [](double r0, double r1, double r2) {
    const double a = std::sqrt(r0), b = std::sqrt(r1), c = std::sqrt(r2);
    return 2.0 / 3.0 * Q3(r0, r1, r2) / (b * (a + b) * (a + b) * std::pow(a + c, 3) * (b + c) * (b + c));
  };
  g.dup = [](double r0, double r1, double r2) { return 2.0 / 3.0 * Q4(r0, r1, r2); };
  g.pdu = [](double r0, double r1, double r2) { return -2.0 / 3.0 * Q4(r2, r1, r0); };
  g.pp = [](double r0, double r1, double r2) {
    const double a = std::sqrt(r0), b = std::sqrt(r1), c = std::sqrt(r2);
    return -2.0 / 3.0 * (a + b + c) / (a * b * c * (a + b) * (a + c) * (b + c));
  };
  return g;
}

GFunctions g_closed_even(int m) {
  if (m < 2) throw DomainError("g_closed_even: needs m >= 2");
  const double mm = m;
  const double n1 = mm * (mm - 1);
  GFunctions g;
  g.d = 2 * m;
  auto two = [m](double r0, double r1, auto coef) {
    double s = 0;
    for (int l = 0; l <= m - 2; ++l) s += coef(l) * std::pow(r0, l + 1 - m) * std::pow(r1, -l - 1);
    return s;
  };
  auto three = [m](double r0, double r1, double r2, auto coef) {
    double s = 0;
    for (int k = 0; k <= m - 2; ++k)
      for (int l = 0; l <= k; ++l)
        s += coef(l, k) * std::pow(r0, k + 1 - m) * std::pow(r1, l - k - 1) * std::pow(r2, -l - 1);
    return s;
  };
  g.q = [=](double r0, double r1) { return two(r0, r1, [&](int) { return 1.0 / (mm - 1); }); };
  g.ddu = [=](double r0, double r1) {
    return -two(r0, r1, [&](int l) { return (mm - l - 1) * (l + 1) / n1; });
  };
  g.dp = [=](double r0, double r1) { return -two(r0, r1, [&](int l) { return (mm - l - 1) / n1; }); };
  g.dudu = [=](double r0, double r1, double r2) {
    return -three(r0, r1, r2, [&](int l, int k) { return (2.0 * l + 1) * (2.0 * k - 2 * mm + 3) / (2 * n1); });
  };
  g.pdu = [=](double r0, double r1, double r2) {
    return -three(r0, r1, r2, [&](int l, int) { return (2.0 * l + 1) / (2 * n1); });
  };
  g.dup = [=](double r0, double r1, double r2) {
    return -three(r0, r1, r2, [&](int, int k) { return (2.0 * k - 2 * mm + 3) / (2 * n1); });
  };
  g.pp = [=](double r0, double r1, double r2) {
    return -three(r0, r1, r2, [&](int, int) { return 1.0 / (2 * n1); });
  };
  return g;
}

GFunctions g_closed(int d, const SpectralOptions& opt) {
  if (d == 3) return g_closed_d3();
  if (d >= 4 && d % 2 == 0) return g_closed_even(d / 2);
  if (d != 2) throw DomainError("g_closed: no closed form for d = " + std::to_string(d));
  const GFunctions raw = g_closed_d2_raw();
  const GFunctions gen = g_generic(2, opt);
  const double tol = opt.closed_form_min_gap;
  auto ok2 = [tol](double a, double b) {
    const double r[2] = {a, b};
    return min_relative_gap(r) >= tol;
  };
  auto ok3 = [tol](double a, double b, double c) {
    const double r[3] = {a, b, c};
    return min_relative_gap(r) >= tol;
  };
  GFunctions g;
  g.d = 2;
  auto pick2 = [&](Fn2 closed, Fn2 fallback) -> Fn2 {
    return [=](double a, double b) { return ok2(a, b) ? closed(a, b) : fallback(a, b); };
  };
  auto pick3 = [&](Fn3 closed, Fn3 fallback) -> Fn3 {
    return [=](double a, double b, double c) { return ok3(a, b, c) ? closed(a, b, c) : fallback(a, b, c); };
  };
  // I_{1,1} is already stable at coincidence
  g.q = raw.q;
  g.dp = pick2(raw.dp, gen.dp);
  g.ddu = pick2(raw.ddu, gen.ddu);
  g.dudu = pick3(raw.dudu, gen.dudu);
  g.dup = pick3(raw.dup, gen.dup);
  g.pdu = pick3(raw.pdu, gen.pdu);
  g.pp = pick3(raw.pp, gen.pp);
  return g;
}

// ----------------------------------------------------------------------------
// relations

namespace {

double normalised(std::initializer_list<double> terms) {
  double s = 0, a = 0;
  for (double t : terms) {
    s += t;
    a += std::abs(t);
  }
  return a == 0 ? 0.0 : std::abs(s) / a;
}

}  // namespace

std::array<double, 10> g_relations_all(const GFunctions& g, double r0, double r1, double r2) {
  const double q01 = g.q(r0, r1), ddu01 = g.ddu(r0, r1), dp01 = g.dp(r0, r1);
  const double q02 = g.q(r0, r2), ddu02 = g.ddu(r0, r2), dp02 = g.dp(r0, r2);
  const double uu = g.dudu(r0, r1, r2), pu = g.pdu(r0, r1, r2), up = g.dup(r0, r1, r2), pp = g.pp(r0, r1, r2);
  std::array<double, 10> res{};
  res[0] = normalised({(r0 + r1) * dp01, r0 * q01, (r0 - r1) * ddu01});
  res[1] = normalised({(r0 + r2) * (r1 + r2) * up, r2 * q02, (r0 + 3 * r2) * ddu02, (r0 + r2) * (r1 - r2) * uu});
  res[2] = normalised({(r0 + r2) * (r1 + r0) * pu, -r0 * q02, -(3 * r0 + r2) * ddu02, -(r0 + r2) * (r1 - r0) * uu});
  // G_pp: the (r0 - r1)(r1 - r2) G_dudu term enters with a minus sign
  res[3] = normalised({(r0 + r1) * (r1 + r2) * pp, r1 * q02, -(r0 - 2 * r1 + r2) * ddu02, -(r0 - r1) * (r1 - r2) * uu});
  res[4] = normalised({r0 * q01, (r0 - r1) * ddu01, (r0 + r1) * dp01});
  res[5] = normalised({dp02, -(r0 - r1) * up, -(r0 + r1) * pp});
  res[6] = normalised({q02, dp02, (r1 - r2) * pu, (r1 + r2) * pp});
  res[7] = normalised({2 * ddu02, -dp02, -(r0 - r1) * uu, -(r0 + r1) * pu});
  res[8] = normalised({q02, 2 * ddu02, dp02, (r1 - r2) * uu, (r1 + r2) * up});
  res[9] = normalised({r0 * q02, (r0 - 2 * r1 + r2) * ddu02, (r0 - r2) * dp02, (r0 - r1) * (r1 - r2) * uu,
                       (r0 + r1) * (r1 - r2) * pu, (r0 - r1) * (r1 + r2) * up, (r0 + r1) * (r1 + r2) * pp});
  return res;
}

double g_relations_residual(const GFunctions& g, double r0, double r1, double r2) {
  const auto all = g_relations_all(g, r0, r1, r2);
  return *std::max_element(all.begin(), all.end());
}

VanishingCombinations vanishing_combinations(const FFunctions& f, double r0, double r1) {
  const GeoCoeffs du = f.du(r0, r1), v = f.v(r0, r1);
  const double dv = f.dv(r0, r1);
  const double vv = r0 * f.vv(r0, r0, r1) + r1 * f.vv(r0, r1, r1);
  const double bracket = f.ddu(r0, r1) - r0 * f.vdu(r0, r0, r1) - r1 * f.duv(r0, r1, r1) - vv;
  VanishingCombinations out;
  // [alpha/2 - beta] bracket, plus beta F_dv
  out.grad_u.alpha = du.alpha + v.alpha + 0.5 * bracket;
  out.grad_u.beta = du.beta + v.beta + dv - bracket;
  out.p.alpha = v.alpha + 0.5 * dv - 0.5 * vv;
  out.p.beta = v.beta + vv;
  return out;
}

// ----------------------------------------------------------------------------
// conformal-like and two-torus

double fconf_dk(const GFunctions& g, double r0, double r1) {
  const double a = std::sqrt(r0), b = std::sqrt(r1);
  return -a * g.q(r0, r1) - (a + b) * g.ddu(r0, r1) - (a - b) * g.dp(r0, r1);
}

double fconf_dk_simplified(const GFunctions& g, double r0, double r1) {
  const double a = std::sqrt(r0), b = std::sqrt(r1);
  return -a * b * (a + b) * (g.q(r0, r1) + 2 * g.ddu(r0, r1)) / (r0 + r1);
}

double fconf_dkdk(const GFunctions& g, double r0, double r1, double r2) {
  const double a = std::sqrt(r0), b = std::sqrt(r1), c = std::sqrt(r2);
  return 2 * g.ddu(r0, r2) + (a + b) * (b + c) * g.dudu(r0, r1, r2) + (a - b) * (b + c) * g.pdu(r0, r1, r2) +
         (a + b) * (b - c) * g.dup(r0, r1, r2) + (a - b) * (b - c) * g.pp(r0, r1, r2);
}

double nct2_fdk(const GFunctions& g, double r0, double r1) {
  return fconf_dk(g, r0, r1) - (std::sqrt(r0) + std::sqrt(r1)) * g.ddu(r0, r1);
}

double nct2_fg(const GFunctions& g, double r0, double r1, double r2) {
  const double a = std::sqrt(r0), b = std::sqrt(r1), c = std::sqrt(r2);
  return fconf_dkdk(g, r0, r1, r2) + 2 * g.ddu(r0, r2) +
         (a + b) * (b + c) * (g.dudu(r0, r1, r2) - g.pp(r0, r1, r2));
}

double nct2_ff(const GFunctions& g, double r0, double r1, double r2) {
  const double a = std::sqrt(r0), b = std::sqrt(r1), c = std::sqrt(r2);
  return (a + b) * (b + c) * (g.dup(r0, r1, r2) - g.pdu(r0, r1, r2));
}

double nct2_fdk_closed(double r0, double r1) {
  const double a = std::sqrt(r0), b = std::sqrt(r1);
  return (r0 - r1 - a * b * (std::log(r0) - std::log(r1))) / std::pow(a - b, 3);
}

double Qg(double a, double b, double c) {
  const double sa = std::sqrt(a), sb = std::sqrt(b), sc = std::sqrt(c);
  const double num = sa * (a * sb + 3 * a * sc - sa * c - std::sqrt(a * b * c) - 2 * b * sc);
  return num / ((a - b) * (sa - sb) * std::pow(sa - sc, 3));
}

double Qf(double a, double b, double c) {
  const double sa = std::sqrt(a), sb = std::sqrt(b), sc = std::sqrt(c);
  return a * (sb + sc) / ((a - b) * (sa - sb) * (a - c));
}

double nct2_fg_closed(double r0, double r1, double r2) {
  const double a = std::sqrt(r0), b = std::sqrt(r1), c = std::sqrt(r2);
  const double m = r1 + a * c;
  return (a + c) * (a - 2 * b + c) / ((a - b) * (a - c) * (a - c) * (b - c)) + Qg(r0, r1, r2) * std::log(r0) -
         m * m / ((a - b) * (r0 - r1) * (b - c) * (r1 - r2)) * std::log(r1) + Qg(r2, r1, r0) * std::log(r2);
}

double nct2_ff_closed(double r0, double r1, double r2) {
  const double a = std::sqrt(r0), b = std::sqrt(r1), c = std::sqrt(r2);
  const double m = r1 + a * c, n = r1 - a * c;
  return (a - c) * (a - c) / ((a - b) * (a - c) * (a - c) * (b - c)) - Qf(r0, r1, r2) * std::log(r0) +
         m * n / ((a - b) * (r0 - r1) * (b - c) * (r1 - r2)) * std::log(r1) - Qf(r2, r1, r0) * std::log(r2);
}

double nct2_fdk_stable(double r0, double r1) {
  if (!(r0 > 0 && r1 > 0)) throw DomainError("nct2_fdk_stable: arguments must be positive");
  const double s = std::pow(r0 * r1, 0.25);
  const double t = 0.25 * (std::log(r0) - std::log(r1));
  const double sh = std::sinh(t);
  if (std::abs(t) >= 0.5) return (std::sinh(2 * t) - 2 * t) / (4 * s * sh * sh * sh);
  // sinh 2t - 2t = sum_{n >= 1} (2t)^{2n+1} / (2n+1)!, divided by t^3 up front
  const double x2 = 4 * t * t;
  double term = 8.0 / 6.0;  // (2t)^3 / 3! / t^3
  double sum = term;
  for (int n = 2; n < 14; ++n) {
    term *= x2 / ((2.0 * n) * (2.0 * n + 1));
    sum += term;
  }
  const double ratio = t == 0 ? 1.0 : t / sh;  // (t / sinh t)^3 multiplies sum
  return sum * ratio * ratio * ratio / (4 * s);
}

// ----------------------------------------------------------------------------
// identifiers

namespace {

struct NameInfo {
  SpectralName name;
  std::string_view label;
  SpectralFamily family;
  int arity;
};

constexpr NameInfo kNames[] = {
    {SpectralName::F_w, "F_w", SpectralFamily::F, 2},
    {SpectralName::F_dv, "F_dv", SpectralFamily::F, 2},
    {SpectralName::F_ddu, "F_ddu", SpectralFamily::F, 2},
    {SpectralName::F_du, "F_du", SpectralFamily::F, 2},
    {SpectralName::F_v, "F_v", SpectralFamily::F, 2},
    {SpectralName::F_vv, "F_vv", SpectralFamily::F, 3},
    {SpectralName::F_duv, "F_duv", SpectralFamily::F, 3},
    {SpectralName::F_vdu, "F_vdu", SpectralFamily::F, 3},
    {SpectralName::F_dudu, "F_dudu", SpectralFamily::F, 3},
    {SpectralName::G_q, "G_q", SpectralFamily::G, 2},
    {SpectralName::G_ddu, "G_ddu", SpectralFamily::G, 2},
    {SpectralName::G_dp, "G_dp", SpectralFamily::G, 2},
    {SpectralName::G_dudu, "G_dudu", SpectralFamily::G, 3},
    {SpectralName::G_pdu, "G_pdu", SpectralFamily::G, 3},
    {SpectralName::G_dup, "G_dup", SpectralFamily::G, 3},
    {SpectralName::G_pp, "G_pp", SpectralFamily::G, 3},
    {SpectralName::Q1, "Q1", SpectralFamily::Q, 3},
    {SpectralName::Q2, "Q2", SpectralFamily::Q, 3},
    {SpectralName::Q3, "Q3", SpectralFamily::Q, 3},
    {SpectralName::Q4, "Q4", SpectralFamily::Q, 3},
    {SpectralName::Fconf_dk, "Fconf_dk", SpectralFamily::Fconf, 2},
    {SpectralName::Fconf_dkdk, "Fconf_dkdk", SpectralFamily::Fconf, 3},
};

constexpr SpectralName kAll[] = {
    SpectralName::F_w,    SpectralName::F_dv,     SpectralName::F_ddu,     SpectralName::F_du,
    SpectralName::F_v,    SpectralName::F_vv,     SpectralName::F_duv,     SpectralName::F_vdu,
    SpectralName::F_dudu, SpectralName::G_q,      SpectralName::G_ddu,     SpectralName::G_dp,
    SpectralName::G_dudu, SpectralName::G_pdu,    SpectralName::G_dup,     SpectralName::G_pp,
    SpectralName::Q1,     SpectralName::Q2,       SpectralName::Q3,        SpectralName::Q4,
    SpectralName::Fconf_dk, SpectralName::Fconf_dkdk};

const NameInfo& info(SpectralName n) {
  for (const auto& i : kNames)
    if (i.name == n) return i;
  throw ValidationError("unknown spectral function");
}

}  // namespace

SpectralFamily SpectralFunctionId::family() const { return info(name).family; }
int SpectralFunctionId::arity() const { return info(name).arity; }
bool SpectralFunctionId::needs_geometry() const { return name == SpectralName::F_du || name == SpectralName::F_v; }
std::string_view SpectralFunctionId::label() const { return info(name).label; }

SpectralFunctionId SpectralFunctionId::parse(std::string_view name, int d) {
  for (const auto& i : kNames)
    if (i.label == name) return SpectralFunctionId{i.name, d};
  throw ValidationError("unknown spectral function '" + std::string(name) + "'");
}

std::span<const SpectralName> all_spectral_names() { return kAll; }

double spectral_fn_eval(const SpectralFunctionId& id, std::span<const double> rs,
                        std::optional<std::pair<double, double>> geo, const SpectralOptions& opt) {
  if (static_cast<int>(rs.size()) != id.arity())
    throw ValidationError(std::string(id.label()) + ": expected " + std::to_string(id.arity()) + " arguments, got " +
                          std::to_string(rs.size()));
  if (id.needs_geometry() && !geo) throw ValidationError(std::string(id.label()) + ": needs (alpha, beta)");
  for (double r : rs)
    if (!(r > 0) || !std::isfinite(r)) throw DomainError(std::string(id.label()) + ": arguments must be positive");
  const double r0 = rs[0], r1 = rs[1], r2 = rs.size() > 2 ? rs[2] : 0.0;
  double v = 0;
  switch (id.family()) {
    case SpectralFamily::Q:
      switch (id.name) {
        case SpectralName::Q1:
          // a rational coefficient of the log form, divergent at coincident arguments
          if (min_relative_gap(rs) < opt.closed_form_min_gap)
            throw ConfluenceError("Q1: singular at coincident arguments; evaluate G_dudu instead");
          v = Q1(r0, r1, r2);
          break;
        case SpectralName::Q2: v = g_closed(2, opt).dup(r0, r1, r2); break;
        case SpectralName::Q3: v = Q3(r0, r1, r2); break;
        default: v = Q4(r0, r1, r2); break;
      }
      break;
    case SpectralFamily::F: {
      const FFunctions f = f_generic(id.d, opt);
      switch (id.name) {
        case SpectralName::F_w: v = f.w(r0, r1); break;
        case SpectralName::F_dv: v = f.dv(r0, r1); break;
        case SpectralName::F_ddu: v = f.ddu(r0, r1); break;
        case SpectralName::F_du: v = f.du(r0, r1).eval(geo->first, geo->second); break;
        case SpectralName::F_v: v = f.v(r0, r1).eval(geo->first, geo->second); break;
        case SpectralName::F_vv: v = f.vv(r0, r1, r2); break;
        case SpectralName::F_duv: v = f.duv(r0, r1, r2); break;
        case SpectralName::F_vdu: v = f.vdu(r0, r1, r2); break;
        default: v = f.dudu(r0, r1, r2); break;
      }
      break;
    }
    case SpectralFamily::G:
    case SpectralFamily::Fconf: {
      const GFunctions g = g_generic(id.d, opt);
      switch (id.name) {
        case SpectralName::G_q: v = g.q(r0, r1); break;
        case SpectralName::G_ddu: v = g.ddu(r0, r1); break;
        case SpectralName::G_dp: v = g.dp(r0, r1); break;
        case SpectralName::G_dudu: v = g.dudu(r0, r1, r2); break;
        case SpectralName::G_pdu: v = g.pdu(r0, r1, r2); break;
        case SpectralName::G_dup: v = g.dup(r0, r1, r2); break;
        case SpectralName::G_pp: v = g.pp(r0, r1, r2); break;
        case SpectralName::Fconf_dk: v = fconf_dk(g, r0, r1); break;
        default: v = fconf_dkdk(g, r0, r1, r2); break;
      }
      break;
    }
  }
  if (!std::isfinite(v)) throw EvaluationError(std::string(id.label()) + ": non-finite value");
  return v;
}

}  // namespace heatcoeff
