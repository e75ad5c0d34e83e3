#pragma once

/*! \file
    \brief Spectral functions of the second heat coefficient.

    - F family: coefficients of the coordinate form (u, v, w), built from I_{d/2+p,k}.
    - G family: coefficients of the covariant form (u, p, q), obtained from F.
    - Closed forms by dimension: logarithms for d = 2, square roots for d = 3,
      Laurent polynomials for even d >= 4.
    - Functions of the conformal-like operator k Delta k and of the two-torus density.

    Functions linear in the chart quantities alpha, beta return the pair of coefficients
    (\ref GeoCoeffs) instead of taking alpha and beta as arguments.
*/

#include "heatcoeff/universal_functions.hpp"

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace heatcoeff {

enum class IBackend { divided_difference, quadrature };

struct SpectralOptions {
  IBackend backend = IBackend::divided_difference;
  double quad_tol = 1e-11;
  GapPolicy policy{};
  //! Relative gap under which the d = 2 closed forms defer to the generic path.
  double closed_form_min_gap = 0.05;
};

//! I_{alpha,k} through the selected backend.
double i_value(double alpha, std::span<const double> rs, const SpectralOptions& opt);
inline double i_value(double alpha, std::initializer_list<double> rs, const SpectralOptions& opt) {
  return i_value(alpha, std::span<const double>(rs.begin(), rs.size()), opt);
}

//! c_alpha * alpha + c_beta * beta, for one index component.
struct GeoCoeffs {
  double alpha = 0.0;
  double beta = 0.0;
  double eval(double a, double b) const { return alpha * a + beta * b; }
};

using Fn2 = std::function<double(double, double)>;
using Fn3 = std::function<double(double, double, double)>;
using Geo2 = std::function<GeoCoeffs(double, double)>;

/*! Coefficient functions of the coordinate form.
    du gives F_{du}^mu in terms of (alpha^mu, beta^mu); v gives F_{v,mu} in terms of
    (alpha_mu, beta_mu). */
struct FFunctions {
  int d = 0;
  Fn2 w, dv, ddu;
  Geo2 du, v;
  Fn3 vv, duv, vdu, dudu;
};

//! Coefficient functions of the covariant form.
struct GFunctions {
  int d = 0;
  Fn2 q, ddu, dp;
  Fn3 dudu, pdu, dup, pp;
};

//! F as combinations of I_{d/2+p,k}; continuous at coincident arguments.
FFunctions f_generic(int d, const SpectralOptions& opt = {});

//! F expressed through I_{d/2,1} alone. Gap denominators: arguments must be distinct.
FFunctions f_reduced(int d, const SpectralOptions& opt = {});

//! G assembled from an F set.
GFunctions g_from_f(const FFunctions& f);
inline GFunctions g_generic(int d, const SpectralOptions& opt = {}) { return g_from_f(f_generic(d, opt)); }

/*! Closed forms: d = 2 (logarithms), d = 3 (square roots) or even d >= 4 (Laurent).
    Near-confluent d = 2 arguments fall back to the generic path. Other d: DomainError. */
GFunctions g_closed(int d, const SpectralOptions& opt = {});

//! The d = 2 closed forms with no fallback; they lose digits as arguments merge.
GFunctions g_closed_d2_raw();
GFunctions g_closed_d3();
GFunctions g_closed_even(int m);

double Q1(double a, double b, double c);
double Q2(double a, double b, double c);
double Q3(double a, double b, double c);
double Q4(double a, double b, double c);

// ----------------------------------------------------------------------------
// relations and vanishing combinations

/*! Largest normalised residual of the four derived relations and the six vanishing
    combinations that link the G functions. Each residual is |sum of terms| divided by
    the sum of |terms|, so the measure is scale free. */
double g_relations_residual(const GFunctions& g, double r0, double r1, double r2);

//! The ten residuals in the order: four relations, then six combinations.
std::array<double, 10> g_relations_all(const GFunctions& g, double r0, double r1, double r2);

//! Coefficients of the two first-order terms that must cancel in the covariant form.
struct VanishingCombinations {
  GeoCoeffs grad_u;  // in terms of alpha^mu, beta^mu
  GeoCoeffs p;       // in terms of alpha_mu, beta_mu
};
VanishingCombinations vanishing_combinations(const FFunctions& f, double r0, double r1);

// ----------------------------------------------------------------------------
// conformal-like operator k Delta k

//! Coefficient of E (Delta k) E, three-term form.
double fconf_dk(const GFunctions& g, double r0, double r1);
//! Same coefficient after eliminating G_dp through the relations.
double fconf_dk_simplified(const GFunctions& g, double r0, double r1);
//! Coefficient of g^{mu nu} E (nabla_mu k) E (nabla_nu k) E.
double fconf_dkdk(const GFunctions& g, double r0, double r1, double r2);

// ----------------------------------------------------------------------------
// two-torus density R_2 = (1/4pi)[F_dk E(Delta k)E + (g F_g + f F_f) E(d k)E(d k)E]

double nct2_fdk(const GFunctions& g, double r0, double r1);
double nct2_fg(const GFunctions& g, double r0, double r1, double r2);
double nct2_ff(const GFunctions& g, double r0, double r1, double r2);

//! Logarithmic closed forms; singular at coincident arguments.
double nct2_fdk_closed(double r0, double r1);
double nct2_fg_closed(double r0, double r1, double r2);
double nct2_ff_closed(double r0, double r1, double r2);
double Qg(double a, double b, double c);
double Qf(double a, double b, double c);

/*! F_dk rewritten in s = (r0 r1)^{1/4}, t = ln(r0/r1)/4:
    (sinh 2t - 2t) / (4 s sinh^3 t), with a series near t = 0. */
double nct2_fdk_stable(double r0, double r1);

// ----------------------------------------------------------------------------
// identifiers

enum class SpectralFamily { F, G, Q, Fconf };

enum class SpectralName {
  F_w, F_dv, F_ddu, F_du, F_v, F_vv, F_duv, F_vdu, F_dudu,
  G_q, G_ddu, G_dp, G_dudu, G_pdu, G_dup, G_pp,
  Q1, Q2, Q3, Q4,
  Fconf_dk, Fconf_dkdk
};

struct SpectralFunctionId {
  SpectralName name = SpectralName::G_q;
  int d = 2;

  SpectralFamily family() const;
  int arity() const;
  bool needs_geometry() const;
  std::string_view label() const;
  //! Accepts the labels returned by \ref label; throws ValidationError otherwise.
  static SpectralFunctionId parse(std::string_view name, int d);
};

//! Every name, for sweeps.
std::span<const SpectralName> all_spectral_names();

/*! Evaluates a spectral function through the generic path. geo = (alpha, beta) with the
    index placement of the function, required for F_du and F_v. Q2 falls back to the generic
    G_dup near coincidence; Q1 has no finite limit there and throws ConfluenceError. */
double spectral_fn_eval(const SpectralFunctionId& id, std::span<const double> rs,
                        std::optional<std::pair<double, double>> geo = std::nullopt,
                        const SpectralOptions& opt = {});

}  // namespace heatcoeff
