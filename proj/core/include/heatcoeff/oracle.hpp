#pragma once

/*! \file
    \brief Spectral oracle: Galerkin matrices of P on truncated Fourier (or GNS) bases,
    weighted heat traces from one eigendecomposition, and least-squares fits of the
    small-t expansion Tr(a e^{-tP}) ~ sum_r a_r(a, P) t^{(r - d)/2}.

    Fields that ignore some axes are handled by a transverse reduction: on those axes the
    operator acts diagonally on e^{i n.x}, so the matrix splits into one block per transverse
    mode n, and blocks with equal data are merged with a multiplicity.
*/

#include "heatcoeff/fourier.hpp"
#include "heatcoeff/linalg.hpp"
#include "heatcoeff/nct.hpp"

#include <optional>
#include <string>
#include <vector>

namespace heatcoeff {

struct OracleOptions {
  int cutoff = 24;               // modes -M..M per active axis (GNS: per generator)
  int transverse_radius = 0;     // 0: chosen from the t window
  size_t max_block_dim = 4096;   // dense eigendecomposition cap
  double hermitian_tol = 1e-10;  // below this defect the Hermitian solver is used
  bool keep_matrices = false;    // otherwise block matrices are released after decomposition
};

struct OperatorBlock {
  Mat matrix;  // empty unless OracleOptions::keep_matrices
  double multiplicity = 1.0;
  double hermitian_defect = 0.0;  // ||P - P^dagger||_F / ||P||_F
  bool hermitian = false;
  CVec eigenvalues;
  Mat vectors;
  Mat inverse;  // empty for Hermitian blocks (the adjoint is used)
};

struct AssembledOperator {
  int d = 0;
  int N = 0;
  int cutoff = 0;
  std::vector<bool> active;
  int transverse_radius = 0;
  size_t basis_dim = 0;          // size of one block
  size_t transverse_modes = 0;   // transverse modes summed (with multiplicity)
  double lambda_cut = 0.0;       // u_min g_min M^2
  double lambda_transverse = 0;  // u_min g_min of the transverse axes
  std::vector<ModeIndex> basis;  // active-axis modes of one block (full length d, zeros elsewhere)
  std::vector<OperatorBlock> blocks;

  double hermitian_defect() const;
  double min_real_eigenvalue() const;
};

/*! Fourier Galerkin matrix of a constant-metric operator. Block (m, n) is
    u_{m-n} (K_n^T G K_n) - i v^mu_{m-n} K_{n,mu} - w_{m-n}, K_n = (n, n_perp).
    Throws SizeError when a block exceeds max_block_dim. */
AssembledOperator assemble(const FourierOperator& op, const OracleOptions& opt = {}, std::optional<double> t_min = {});

/*! GNS matrices of P_1 = k Delta k and P_2 = delta^dagger k^2 delta on the span of U^a V^b,
    |a|, |b| <= M. Delta U^a V^b = |a + tau b|^2 U^a V^b, delta U^a V^b = i(a + conj(tau) b) U^a V^b. */
AssembledOperator assemble_nct2(const NctElement& k, cplx tau, const OracleOptions& opt = {});

//! Weight matrix of multiplication by a on one Fourier block (a must ignore the transverse axes).
Mat multiplication_matrix(const AssembledOperator& op, const FourierField& a);
//! Left multiplication by a on the GNS block basis.
Mat left_multiplication_matrix(const AssembledOperator& op, const NctElement& a);

//! Eigenvalues and diagonal weights (V^{-1} A V)_{jj} times the block multiplicity, flattened.
struct HeatTraceData {
  std::vector<cplx> lambda;
  std::vector<cplx> weight;
};

//! A empty means the identity.
HeatTraceData heat_trace_data(const AssembledOperator& op, const Mat& A = Mat());
cplx heat_trace(const HeatTraceData& data, double t);

// ----------------------------------------------------------------------------
// asymptotic fit

struct FitOptions {
  int n_terms = 3;             // a_0, a_2, a_4
  int points = 24;
  double t_min = 0.0;          // 0: 20 / lambda_cut
  double t_max = 0.5;
  double max_condition = 1e12;
};

struct HeatFitReport {
  int d = 0;
  std::vector<double> t, trace, model, residual;
  std::vector<double> coefficients;  // a_0, a_2, a_4, ...
  double residual_norm = 0.0;        // weighted, relative to the weighted data norm
  double condition = 0.0;
  std::optional<double> closed_form_a2;
  std::optional<double> delta;       // |fit - closed| / |closed|
  std::optional<double> absolute_delta;

  double a0() const { return coefficients.at(0); }
  double a2() const { return coefficients.at(1); }
  void set_closed_form(double a2_closed);
};

//! Geometric grid of points in [t_min, t_max].
std::vector<double> t_window(double t_min, double t_max, int points);

/*! Weighted least squares of samples against t^{(r - d)/2}, r = 0, 2, ..., 2(n_terms - 1),
    with weights t^{d/2}. Throws FitError when the design matrix condition exceeds the limit. */
HeatFitReport fit_asymptotics(const std::vector<double>& t, const std::vector<double>& values, int d, int n_terms,
                              double max_condition = 1e12);

// ----------------------------------------------------------------------------
// end-to-end

struct VerifyOptions {
  OracleOptions oracle;
  FitOptions fit;
  int density_points = 64;  // per active axis for the closed-form integral
  DensityForm form = DensityForm::automatic;
  NctCurvatureOptions nct;
};

//! Heat trace of one assembly sampled on the t window and fitted.
HeatFitReport fit_heat_trace(const AssembledOperator& op, const Mat& A, const FitOptions& fit);

//! Fitted a_2(a, P) against the integral of tr(a R_2) |g|^{1/2}. An empty weight means the identity.
HeatFitReport verify_fourier(const FourierOperator& op, const std::optional<FourierField>& weight,
                             const VerifyOptions& opt = {});

//! Fitted a_2(a, P_1 + P_2) against (2 pi)^2 tau_2^{-1} t(a R_2).
HeatFitReport verify_nct2(const NctElement& k, cplx tau, const std::optional<NctElement>& weight,
                          const VerifyOptions& opt = {});

//! One assembly and one density shared by several weights.
std::vector<HeatFitReport> verify_fourier(const FourierOperator& op,
                                          const std::vector<std::optional<FourierField>>& weights,
                                          const VerifyOptions& opt = {});
std::vector<HeatFitReport> verify_nct2(const NctElement& k, cplx tau,
                                       const std::vector<std::optional<NctElement>>& weights,
                                       const VerifyOptions& opt = {});

//! t_min = 20 / lambda_cut with the fit's explicit value taking precedence.
double oracle_t_min(const AssembledOperator& op, const FitOptions& fit);

}  // namespace heatcoeff
