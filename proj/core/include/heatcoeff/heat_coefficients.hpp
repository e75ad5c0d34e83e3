#pragma once

/*! \file
    \brief Assembly of the second heat coefficient density R_2 and of a_2(a, P).

    The local routines act at one chart point on jets of the operator fields:
    - \ref r2_local_uvw for P = -(g^{mu nu} u d_mu d_nu + v^mu d_mu + w),
    - \ref r2_local_upq for the covariant form with (u, p, q, A),
    - \ref r2_corollary for the closed forms in d = 2, 3, 4 and even d,
    - \ref r2_minimal and \ref r2_conformal_like for the special operators.
    All results carry the prefactor 1 / (2^d pi^{d/2}); the volume element is applied
    by \ref a2_integrate.
*/

#include "heatcoeff/geometry.hpp"
#include "heatcoeff/spectral_calculus.hpp"
#include "heatcoeff/spectral_functions.hpp"

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace heatcoeff {

//! 1 / (2^d pi^{d/2}).
double r2_prefactor(int d);

struct LocalOptions {
  double cluster_tol = 1e-8;
};

//! Coordinate form. u needs order 2, v order 1, metric order 2.
Mat r2_local_uvw(const MetricJet& g, const PointFieldsUVW& f, const FFunctions& F, const LocalOptions& opt = {});

//! Covariant form. u needs order 2, p and A order 1.
Mat r2_local_upq(const MetricJet& g, const PointFieldsUPQ& f, const GFunctions& G, const LocalOptions& opt = {});

enum class CorollaryBranch { d2, d3, d4, even };

std::string to_string(CorollaryBranch b);

/*! Closed-form densities. \c d4 uses matrix inverses only; the other branches feed the
    closed spectral functions into the covariant assembly. Throws DomainError when the
    branch does not fit the dimension of the metric. */
Mat r2_corollary(CorollaryBranch branch, const MetricJet& g, const PointFieldsUPQ& f, const LocalOptions& opt = {},
                 const SpectralOptions& sopt = {});

//! Default branch for a dimension, if any.
std::optional<CorollaryBranch> corollary_branch_for(int d);

/*! u = 1: (R/6 + q - nabla_mu p^mu / 2 - p^mu p_mu / 4) times the prefactor.
    Throws ValidationError when u is not the identity. */
Mat r2_minimal(const MetricJet& g, const PointFieldsUPQ& f);

//! Gauge-reduced minimal density (R/6 + q') times the prefactor.
Mat r2_minimal_reduced(const MetricJet& g, const Mat& q_prime);

/*! Covariant fields of k Delta k with Delta = -g^{mu nu} nabla_mu nabla_nu:
    u = k^2, p^nu = g^{mu nu}[k (nabla_mu k) - (nabla_mu k) k], q = -k (Delta k).
    k needs order 2, A order 1. */
PointFieldsUPQ conformal_like_fields(const MetricJet& g, const MatJet& k, const std::vector<MatJet>& A);

//! Density of k Delta k through the two conformal spectral functions.
Mat r2_conformal_like(const MetricJet& g, const MatJet& k, const std::vector<MatJet>& A, const GFunctions& G,
                      const LocalOptions& opt = {});

/*! Trace of the density for even d = 2m written with the explicit Laurent sums of the
    a = 1 case. Inputs as for \ref r2_local_uvw. */
cplx trace_r2_collapsed(const MetricJet& g, const PointFieldsUVW& f, const LocalOptions& opt = {});

// ----------------------------------------------------------------------------
// grids and integration

//! Periodic grid: points per axis and axis lengths, C order (last axis fastest).
struct Grid {
  std::vector<int> n;
  std::vector<double> length;

  int dim() const { return static_cast<int>(n.size()); }
  size_t size() const;
  std::vector<double> point(size_t flat) const;
  double cell_volume() const;
};

enum class FormUsed { coordinate, covariant, corollary_d2, corollary_d3, corollary_d4, corollary_even, minimal, conformal_like };

std::string to_string(FormUsed f);

struct HeatDensityResult {
  Grid grid;
  int N = 0;
  std::vector<Mat> R2;          // per grid point
  std::vector<double> sqrt_g;   // |g|^{1/2} per grid point
  FormUsed form_used = FormUsed::covariant;
  std::vector<int> clusters;    // per grid point
  int confluent_points = 0;     // points where u had merged eigenvalues
};

enum class Measure { g, h_metric, normalized };

/*! Trapezoidal integral of tr(a R_2) against the chosen volume element.
    - g: |g|^{1/2} dx.
    - h_metric: the density is rescaled by |g|^{1/2} |h|^{-1/2} and integrated against
      |h|^{1/2} dx; sqrt_h gives |h|^{1/2} per point.
    - normalized: the g integral divided by the total g volume and by N.
    An empty \c a means the identity. */
cplx a2_integrate(const std::vector<Mat>& a, const HeatDensityResult& result, Measure measure = Measure::g,
                  const std::vector<double>& sqrt_h = {});

}  // namespace heatcoeff
