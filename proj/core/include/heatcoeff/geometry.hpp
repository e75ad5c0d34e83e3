#pragma once

/*! \file
    \brief Chart-level metric calculus and operator-field conversions.

    Everything here is pointwise: metric and fields are jets at one chart point.
    Index conventions:
    - Christoffel symbols Gamma^nu_{mu rho} are stored at [nu][mu][rho];
    - R^rho_{sigma mu nu} = d_mu Gamma^rho_{nu sigma} - d_nu Gamma^rho_{mu sigma} + ...,
      Ricci R_{sigma nu} = R^rho_{sigma rho nu}, so the unit sphere has R = 2.
*/

#include "heatcoeff/jet.hpp"

#include <vector>

namespace heatcoeff {

//! Inverse metric g^{mu nu} with first and second derivatives at one point.
struct MetricJet {
  int dim = 0;
  std::vector<RJet> ginv;  // row-major dim x dim, each of order 2

  static MetricJet constant(const RMat& g_inv);
  /*! dg[rho](mu,nu) = d_rho g^{mu nu}; ddg[rho * dim + sigma](mu,nu) = d_rho d_sigma g^{mu nu}. */
  static MetricJet from_arrays(const RMat& g_inv, const std::vector<RMat>& dg, const std::vector<RMat>& ddg);

  const RJet& up(int mu, int nu) const { return ginv[static_cast<size_t>(mu) * dim + nu]; }
  RMat g_inv() const;
  RMat g_lower() const;
  //! Symmetry and positive definiteness; throws DomainError.
  void validate() const;
};

//! Quantities derived from a metric jet, each as a jet of order 1 unless noted.
struct MetricData {
  int dim = 0;
  std::vector<RJet> glo;                  // g_{mu nu}, order 2
  std::vector<RJet> gamma;                // Gamma^nu_{mu rho} at [(nu * dim + mu) * dim + rho]
  std::vector<RJet> alpha_lo, alpha_up;   // alpha_mu, alpha^mu
  std::vector<RJet> beta_lo, beta_up;     // beta_mu, beta^mu
  std::vector<RJet> gamma_trace;          // g^{mu nu} Gamma^rho_{mu nu} expressed as alpha^rho / 2 - beta^rho
  double scalar_curvature = 0.0;

  const RJet& Gamma(int nu, int mu, int rho) const {
    return gamma[(static_cast<size_t>(nu) * dim + mu) * dim + rho];
  }
  const RJet& lower(int mu, int nu) const { return glo[static_cast<size_t>(mu) * dim + nu]; }
};

MetricData metric_data(const MetricJet& jet);

//! Gamma^nu_{mu rho} values, flattened as in MetricData::gamma.
std::vector<double> christoffel(const MetricJet& jet);

struct AlphaBeta {
  RVec alpha_lo, alpha_up, beta_lo, beta_up;
};
AlphaBeta alpha_beta(const MetricJet& jet);

double scalar_curvature(const MetricJet& jet);

//! The seven-term non-covariant coefficient alpha of the coordinate-form density.
double alpha_coefficient(const MetricJet& jet);

/*! alpha - alpha^mu beta_mu / 4 + beta^mu beta_mu / 2 + d_mu alpha^mu / 4 - d_mu beta^mu / 2
    - alpha_mu alpha^mu / 16 + alpha_mu beta^mu / 4 - beta_mu beta^mu / 4, which equals R / 6. */
double alpha_combination(const MetricJet& jet);

// ----------------------------------------------------------------------------
// operator fields at a point

//! P = -(g^{mu nu} u d_mu d_nu + v^mu d_mu + w). u needs order 2, v order 1.
struct PointFieldsUVW {
  MatJet u;
  std::vector<MatJet> v;
  MatJet w;
};

/*! P = -(g^{mu nu} u nabla_mu nabla_nu + (p^nu + g^{mu nu} nabla_mu u - gamma^nu u) nabla_nu + q)
    with nabla = d + A. u needs order 2, p and A order 1. */
struct PointFieldsUPQ {
  MatJet u;
  std::vector<MatJet> p;
  MatJet q;
  std::vector<MatJet> A;
};

PointFieldsUPQ uvw_to_upq(const MetricData& m, const MetricJet& g, const PointFieldsUVW& f,
                          const std::vector<MatJet>& A);
PointFieldsUVW upq_to_uvw(const MetricData& m, const MetricJet& g, const PointFieldsUPQ& f);

//! Hatted covariant derivatives evaluated at the point.
struct CovariantDerivatives {
  std::vector<Mat> du;   // nabla_mu u
  std::vector<Mat> ddu;  // nabla_mu nabla_nu u at [mu * dim + nu]
  Mat div_p;             // nabla_mu p^mu
};
CovariantDerivatives covariant_derivatives(const MetricData& m, const PointFieldsUPQ& f);

//! nabla_mu u + [A_mu, u] as jets of one order less than u.
std::vector<MatJet> covariant_du(const PointFieldsUPQ& f);

/*! Connection change A -> A + phi. phi needs order 1.
    p'^nu = p^nu - g^{mu nu}(u phi_mu + phi_mu u),
    q' = q - g^{mu nu} nabla_mu(u phi_nu) + g^{mu nu} u phi_mu phi_nu - p^mu phi_mu. */
PointFieldsUPQ gauge_shift(const MetricData& m, const MetricJet& g, const PointFieldsUPQ& f,
                           const std::vector<MatJet>& phi);

//! Solution X of u X + X u = p for positive u (spectral formula).
Mat solve_sylvester(const Mat& u, const Mat& p);

//! phi_mu = g_{mu nu} X^nu with u X^nu + X^nu u = p^nu; values only.
std::vector<Mat> solve_phi_p_zero(const Mat& u, const std::vector<Mat>& p, const RMat& g_inv);

//! Same, carrying first derivatives so that the shifted fields stay differentiable.
std::vector<MatJet> solve_phi_p_zero(const PointFieldsUPQ& f, const MetricJet& g);

}  // namespace heatcoeff
