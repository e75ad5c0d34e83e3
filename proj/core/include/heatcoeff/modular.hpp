#pragma once

/*! \file
    \brief Functional calculus of the modular operator Delta(b) = u^{-1} b u, u = k^2.

    In the eigenbasis of u, Delta multiplies the (a, b) entry by lambda_b / lambda_a.
    E_y(b) = sum_r E_r b E_{y r} collects the entries whose ratio is y.
*/

#include "heatcoeff/spectral_calculus.hpp"

#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace heatcoeff {

//! (sqrt(y) - 1) / ln y, with value 1/2 at y = 1.
double modular_g1(double y);

//! 2 [sqrt(y1)(sqrt(y2) - 1) ln y1 - (sqrt(y1) - 1) ln y2] / [ln y1 ln y2 (ln y1 + ln y2)], continuous.
double modular_g2(double y1, double y2);

//! Spectrum of Delta with the projector maps E_y.
struct ModularSpectralData {
  SpectralDecomposition dec;
  std::vector<double> ratios;                         // distinct y, ascending
  std::vector<std::vector<std::pair<int, int>>> pairs;  // cluster pairs (i, j) with r_j / r_i = y

  int size() const { return static_cast<int>(ratios.size()); }
  //! E_y(b) for the ratio with index iy.
  Mat project(int iy, const Mat& b) const;
};

/*! Ratios closer than ratio_tol (relative) share a projector. */
ModularSpectralData modular_spectrum(const Mat& u, double cluster_tol = 1e-8, double ratio_tol = 1e-10);

using ModularFn = std::function<double(double, std::span<const double>)>;

/*! sum over r_0, y_1..y_p of f(r_0, y) b_0 E_{r_0} E_{y_1}(b_1) ... E_{y_p}(b_p),
    enumerated over clusters and ratios. */
Mat modular_apply(const ModularFn& f, const ModularSpectralData& ms, const Mat& b0, std::span<const Mat> bs);

//! g(Delta)(b) for a one-variable function.
Mat modular_calculus(const std::function<double(double)>& g, const ModularSpectralData& ms, const Mat& b);

/*! Both sides of the rearrangement identity:
    first = sum F(r_0..r_p) b_0 E_{r_0} b_1 E_{r_1} ... b_p E_{r_p},
    second = sum f(r_0, y) b_0 E_{r_0} E_{y_1}(b_1) ... E_{y_p}(b_p), f(r_0, y) = F(r_0, r_0 y_1, ...). */
std::pair<Mat, Mat> rearrange(const std::function<double(std::span<const double>)>& F, const Mat& u,
                              std::span<const Mat> bs);

/*! Derivative of k = exp(h/2) along the direction dh, from an exact block exponential,
    together with k g_1(Delta)[dh]. */
std::pair<Mat, Mat> delta_k_identity(const Mat& h, const Mat& dh);

/*! g^{mu nu} d_mu d_nu k for k = exp(h/2), h = h0 + x^mu h_mu + x^mu x^nu h_{mu nu} / 2, computed
    as Delta k = -g d d k from nested block exponentials (first) and through g_1, g_2 (second). */
std::pair<Mat, Mat> laplacian_k_identity(const Mat& h0, const std::vector<Mat>& h1, const std::vector<Mat>& h2,
                                         const RMat& g_inv);

using Fn1M = std::function<double(double)>;
using Fn2M = std::function<double(double, double)>;
using Fn3M = std::function<double(double, double, double)>;

/*! Residuals (max abs entry of the difference) of the three composition identities that
    move L_k insertions into right-hand spectral factors. bs holds b_0, b_1, b_2. */
struct CompositionResiduals {
  double first = 0.0, second = 0.0, third = 0.0;
};
CompositionResiduals composition_lemma_check(const Fn2M& f1, const Fn3M& f2, const Fn1M& g1, const Fn2M& g2,
                                             const Mat& u, std::span<const Mat> bs);

// ----------------------------------------------------------------------------
// modular curvature functions of the two-torus density

//! 2 sqrt(r0) F_dk(r0, r0 y) g_1(y).
double g_delta_ln_k(double r0, double y);

//! G^{mu nu} = g^{mu nu} metric + f^{mu nu} antisym.
struct ModularPair {
  double metric = 0.0;
  double antisym = 0.0;
};

//! 4 r0 sqrt(y1) F^{mu nu}(r0, r0 y1, r0 y1 y2) g1 g1 - 4 g^{mu nu} sqrt(r0) F_dk(r0, r0 y1 y2) g2.
ModularPair g_dlnk_dlnk(double r0, double y1, double y2);

}  // namespace heatcoeff
