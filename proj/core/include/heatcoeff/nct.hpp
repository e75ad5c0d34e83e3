#pragma once

/*! \file
    \brief Rational noncommutative tori of dimension 2m with block-diagonal deformation.

    An element is a finitely supported map from Z^{2m} to C; the index (a_1, b_1, ..., a_m, b_m)
    stands for the ordered monomial U_1^{a_1} V_1^{b_1} ... U_m^{a_m} V_m^{b_m}, with
    U_i V_i = e^{2 pi i theta_i} V_i U_i and commuting pairs.

    For theta_i = p_i / q_i the element is realised as a matrix function on R^{2m} with
    values in the tensor product of the M_{q_i}(C):
    realize(a)(x) = sum a_k prod_i (e^{i x_{2i}} U0_i)^{a_i} (e^{i x_{2i+1}} V0_i)^{b_i}.
    The derivations act as partial derivatives of the realisation.
*/

#include "heatcoeff/geometry.hpp"
#include "heatcoeff/heat_coefficients.hpp"
#include "heatcoeff/linalg.hpp"

#include <functional>
#include <map>
#include <utility>
#include <vector>

namespace heatcoeff {

struct Rational {
  long p = 0;
  long q = 1;
  double value() const { return static_cast<double>(p) / static_cast<double>(q); }
  //! q > 0 and gcd(p, q) = 1; throws ValidationError.
  void validate() const;
};

//! U0 = cyclic shift, V0 = diag(1, xi, ..., xi^{q-1}), xi = e^{2 pi i p / q}; U0 V0 = xi V0 U0.
std::pair<Mat, Mat> clock_shift(long q, long p);

using NctIndex = std::vector<int>;

struct NctElement {
  int m = 1;
  std::vector<Rational> theta;
  std::map<NctIndex, cplx> coeffs;

  NctElement() = default;
  NctElement(int m_, std::vector<Rational> theta_);

  int dim() const { return 2 * m; }
  //! Product of the denominators: the fiber dimension of the realisation.
  int fiber_dim() const;
  //! Largest |k_i| in the support.
  int radius() const;
  cplx coeff(const NctIndex& k) const;
  void add(const NctIndex& k, cplx c);
  //! Removes coefficients with modulus below tol.
  void prune(double tol = 0.0);
  //! Throws ValidationError on malformed theta or indices.
  void validate() const;
  bool same_algebra(const NctElement& o) const;

  static NctElement scalar(int m, std::vector<Rational> theta, cplx c);
  static NctElement monomial(int m, std::vector<Rational> theta, const NctIndex& k, cplx c = 1.0);
};

NctElement operator+(const NctElement& a, const NctElement& b);
NctElement operator-(const NctElement& a, const NctElement& b);
NctElement operator*(cplx s, const NctElement& a);

/*! Algebra product. With radius >= 0 the result is truncated to max |k_i| <= radius and the
    l1 mass of the dropped coefficients is written to *dropped. */
NctElement multiply(const NctElement& a, const NctElement& b, int radius = -1, double* dropped = nullptr);
inline NctElement operator*(const NctElement& a, const NctElement& b) { return multiply(a, b); }

NctElement adjoint(const NctElement& a);

//! Normalised trace: the coefficient at the origin.
cplx nct_trace(const NctElement& a);

//! delta_mu: coefficient k is multiplied by i k_mu.
NctElement nct_derive(const NctElement& a, int mu);

//! Clock and shift matrices of every pair, built once per algebra.
struct NctRealizer {
  explicit NctRealizer(const NctElement& shape);
  Mat operator()(const NctElement& a, const std::vector<double>& x) const;
  //! Jet of the realisation up to the given order; derivatives are exact.
  MatJet jet(const NctElement& a, const std::vector<double>& x, int order) const;
  int fiber() const { return fiber_; }

  //! Tensor product of U0^{a_i} V0^{b_i} over the pairs.
  Mat monomial(const NctIndex& k) const;

 private:
  int m_ = 1;
  int fiber_ = 1;
  std::vector<long> q_;
  std::vector<std::vector<Mat>> upow_, vpow_;  // powers 0..q-1 per pair
};

Mat realize(const NctElement& a, const std::vector<double>& x);

/*! Residual of the equivariance under the shift of pair i by (2 pi p m / q, 2 pi p n / q):
    realize(x + shift) = W realize(x) W^{-1}, W = U0_i^n V0_i^{-m}. */
double equivariance_residual(const NctElement& a, const std::vector<double>& x, int pair, int m_shift, int n_shift);

/*! Grid-integrated trace of the realisation:
    prod_i (|g_i|^{1/2} q_i) times the integral of tr realize(a) over prod [0, 2 pi / q_i)^2.
    g_inv holds the constant inverse metric of each pair. points: samples per axis. */
cplx phi_correspondence(const NctElement& a, const std::vector<RMat>& g_inv, int points = 0);

//! (2 pi)^{2m} prod |g_i|^{1/2} t(a).
cplx phi_expected(const NctElement& a, const std::vector<RMat>& g_inv);

// ----------------------------------------------------------------------------
// functional calculus through the realisation

struct SampleGrid {
  std::vector<int> n;  // samples per axis over [0, 2 pi)
};

//! Grid fitted to an element: 1 sample on axes the support ignores, otherwise points.
SampleGrid sample_grid_for(const NctElement& a, int points);

/*! Coefficients of a matrix field given on the full period grid, |k_i| <= radius:
    a_k = tr((prod U0^a V0^b)^dagger c_k) / fiber with c_k the discrete Fourier coefficient. */
NctElement extract_coefficients(const NctElement& shape, const SampleGrid& grid,
                                const std::vector<Mat>& samples, int radius);

//! Samples of realize(a) on the grid, C order. Exact: the modes are binned mod n and inverse transformed.
std::vector<Mat> sample(const NctElement& a, const SampleGrid& grid);

//! Jets of the realisation (derivatives from the derived elements) at every grid point.
std::vector<MatJet> sample_jets(const NctElement& a, const SampleGrid& grid, int order);

//! f(h) for self-adjoint h via the eigen-decomposition of each realised sample.
NctElement nct_function(const NctElement& h, const std::function<double(double)>& f, int radius, int points);

//! exp(s h) by a truncated Taylor series with truncated products.
NctElement nct_exp_taylor(const NctElement& h, double s, int radius, int terms = 40);

// ----------------------------------------------------------------------------
// conformal operators on the two-torus

//! g^{11} = 1, g^{12} = tau_1, g^{22} = |tau|^2.
RMat tau_metric(cplx tau);
//! h^{mu nu} = conj(e^mu) e^nu with e = (1, tau).
Eigen::Matrix2cd tau_h(cplx tau);
//! f^{mu nu} = (h^{mu nu} - h^{nu mu}) / 2.
Eigen::Matrix2cd tau_f(cplx tau);

struct Nct2Operator {
  cplx tau;
  RMat g_inv;
  NctElement k, u;
  std::vector<NctElement> dk;  // delta_mu k
  NctElement box_k;            // g^{mu nu} delta_mu delta_nu k = -Delta k
  std::vector<NctElement> p1, p2;
  NctElement q1, q2;
};

/*! Covariant data of P_1 = k Delta k and P_2 = delta^dagger k^2 delta.
    Products are truncated at the given radius. */
Nct2Operator nct2_operator(const NctElement& k, cplx tau, int radius);

struct NctCurvatureOptions {
  int radius = 8;         // coefficient truncation per axis
  int points = 32;        // samples per axis for the pointwise evaluation
  double cluster_tol = 1e-8;
};

struct Nct2Curvature {
  NctElement R2;                 // from the conformal-like and covariant densities
  std::vector<Mat> samples;      // R2 on the sample grid, C order
  SampleGrid grid;
  double closed_form_residual;   // max |R2 - closed-form density| over the grid
};

/*! Density of P_1 plus P_2 for k = exp(h/2). The pointwise value is the sum of the
    conformal-like density and the covariant density of P_2; the log closed forms are
    evaluated alongside and their largest deviation reported. */
Nct2Curvature nct2_curvature(const NctElement& k, cplx tau, const NctCurvatureOptions& opt = {});

//! Closed-form density at one point from the jet of the realised k.
Mat nct2_density_closed(const MatJet& k, cplx tau, double cluster_tol = 1e-8);

struct Nct4Curvature {
  NctElement R2;
  std::vector<Mat> samples;
  SampleGrid grid;
  double corollary_residual;  // max |R2 - d = 4 corollary on the converted fields|
};

/*! (1 / 32 pi^2)[g k^{-2}(dd k^2) k^{-2} - (3/2) g k^{-2}(d k^2) k^{-2}(d k^2) k^{-2}] for a constant
    4 x 4 metric, compared pointwise with the d = 4 corollary applied to u = k^2, p = 0,
    q = g (dd k^2) - g (d k^2) k^{-2} (d k^2). */
Nct4Curvature nct4_curvature(const NctElement& k, const RMat& g_inv, const NctCurvatureOptions& opt = {});

//! Coordinate-form fields u = k^2, v^mu = g^{mu nu} d_nu u, w = g d d u - g (d u) u^{-1} (d u).
PointFieldsUVW nct4_fields(const MatJet& u, const RMat& g_inv);

//! Closed-form four-torus density at one point from the jet of u = k^2.
Mat nct4_density_closed(const MatJet& u, const RMat& g_inv);

}  // namespace heatcoeff
