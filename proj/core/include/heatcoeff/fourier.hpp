#pragma once

/*! \file
    \brief Matrix-valued trigonometric polynomials on the flat torus [0, 2 pi)^d and the
    operator fields built from them.
*/

#include "heatcoeff/heat_coefficients.hpp"
#include "heatcoeff/jet.hpp"
#include "heatcoeff/linalg.hpp"

#include <functional>
#include <map>
#include <vector>

namespace heatcoeff {

using ModeIndex = std::vector<int>;

//! f(x) = sum_k f_k e^{i k.x} with N x N coefficients f_k.
struct FourierField {
  int dim = 0;
  int N = 0;
  std::map<ModeIndex, Mat> modes;

  FourierField() = default;
  FourierField(int dim_, int N_) : dim(dim_), N(N_) {}

  static FourierField constant(int dim, const Mat& c);
  //! c e^{i k.x}.
  static FourierField mode(const ModeIndex& k, const Mat& c);

  /*! Discrete Fourier coefficients of samples on the uniform grid n[j] points over [0, 2 pi),
      C order, keeping |k_j| <= radius; axes with n[j] = 1 carry only k_j = 0.
      Coefficients below drop_tol times the largest are removed. */
  static FourierField from_samples(const std::vector<int>& n, const std::vector<Mat>& samples, int radius,
                                   double drop_tol = 1e-15);
  static FourierField from_function(int dim, int N, const std::vector<int>& n,
                                    const std::function<Mat(const std::vector<double>&)>& f, int radius,
                                    double drop_tol = 1e-15);

  Mat coeff(const ModeIndex& k) const;
  Mat value(const std::vector<double>& x) const;
  MatJet jet(const std::vector<double>& x, int order) const;
  int radius() const;
  //! active[j] is true when some mode has k_j != 0.
  std::vector<bool> active_axes() const;
  void validate() const;
};

FourierField operator+(const FourierField& a, const FourierField& b);
FourierField operator-(const FourierField& a, const FourierField& b);
FourierField operator*(cplx s, const FourierField& a);
//! Pointwise product; with radius >= 0 modes outside |k_j| <= radius are dropped.
FourierField multiply(const FourierField& a, const FourierField& b, int radius = -1);
inline FourierField operator*(const FourierField& a, const FourierField& b) { return multiply(a, b); }
//! Pointwise adjoint.
FourierField adjoint(const FourierField& a);
FourierField derive(const FourierField& a, int mu);

/*! Discrete Fourier coefficients (1/n sum_t s_t e^{-i k x_t}) of samples on the uniform grid,
    one axis at a time, keeping |k_j| <= radius. The result has 2 radius + 1 entries on every axis
    with n[j] > 1 and one entry otherwise, C order, k_j offset by radius. */
std::vector<Mat> truncated_dft(const std::vector<int>& n, std::vector<Mat> samples, int radius);

//! Grid of n points per axis over [0, 2 pi), C order.
std::vector<std::vector<double>> torus_points(const std::vector<int>& n);

//! P = -(g^{mu nu} u d_mu d_nu + v^mu d_mu + w) with a constant inverse metric.
struct FourierOperator {
  RMat g_inv;
  FourierField u;
  std::vector<FourierField> v;
  FourierField w;

  int dim() const { return static_cast<int>(g_inv.rows()); }
  int N() const { return u.N; }
  void validate() const;
  //! Union of the axes any field depends on.
  std::vector<bool> active_axes() const;
  PointFieldsUVW point_fields(const std::vector<double>& x) const;
};

//! Covariant fields with a flat connection: v^nu = p^nu + g^{mu nu} d_mu u, w = q.
FourierOperator operator_from_upq(const RMat& g_inv, const FourierField& u, const std::vector<FourierField>& p,
                                  const FourierField& q);

//! k Delta k: u = k^2, v^nu = 2 g^{mu nu} k d_mu k, w = k g^{mu nu} d_mu d_nu k.
FourierOperator conformal_like_operator(const RMat& g_inv, const FourierField& k);

//! Which local formula produces the density on the grid.
enum class DensityForm { automatic, coordinate, covariant, corollary };

/*! R_2 on a uniform grid with analytic derivatives. Axes on which no field depends get a single
    sample. automatic picks the corollary when the dimension has one and the covariant form
    otherwise. */
HeatDensityResult fourier_heat_density(const FourierOperator& op, int points, DensityForm form = DensityForm::automatic,
                                       const LocalOptions& lopt = {}, const SpectralOptions& sopt = {});

//! Samples of a field on the grid of a density result.
std::vector<Mat> sample_on(const FourierField& f, const Grid& grid);

}  // namespace heatcoeff
