#pragma once

/*! \file
    \brief Clustered spectral decompositions and multi-argument functional calculus.

    A sandwich sum is
    sum over cluster tuples of f(r_0, ..., r_k) E_{r_0} B_1 E_{r_1} ... B_k E_{r_k}.
    It is evaluated in the eigenbasis of u, where each E_r is a contiguous block of
    coordinates.
*/

#include "heatcoeff/linalg.hpp"

#include <functional>
#include <span>
#include <vector>

namespace heatcoeff {

struct SpectralDecomposition {
  int N = 0;
  double cluster_tol = 1e-8;
  std::vector<double> values;      // cluster representatives, ascending
  std::vector<int> offset, count;  // eigenbasis block of each cluster
  Mat basis;                       // unitary eigenvector matrix, columns grouped by cluster
  RVec eigenvalues;                // raw eigenvalues, same order as basis columns

  int clusters() const { return static_cast<int>(values.size()); }
  //! Orthogonal projector onto cluster i.
  Mat projector(int i) const;
  std::vector<Mat> projectors() const;
  //! sum_i r_i E_i.
  Mat reconstruct() const;
  //! B expressed in the eigenbasis.
  Mat rotate_in(const Mat& b) const { return basis.adjoint() * b * basis; }
  Mat rotate_out(const Mat& b) const { return basis * b * basis.adjoint(); }
  //! f(u) for a scalar function, through the cluster representatives.
  Mat apply(const std::function<double(double)>& f) const;
};

/*! Eigen-decomposition of a positive Hermitian matrix with clustering of eigenvalues
    whose gap is below cluster_tol times the spectral radius. */
SpectralDecomposition spectral_decompose(const Mat& u, double cluster_tol = 1e-8);

using SpectralFn = std::function<double(std::span<const double>)>;

//! f evaluated on all (k+1)-tuples of cluster representatives.
struct SpectralTable {
  int k = 0;
  int m = 0;
  std::vector<double> data;  // row-major in (c_0, ..., c_k)
  double at(std::span<const int> idx) const;
};

//! Throws EvaluationError naming the tuple when f is not finite.
SpectralTable tabulate(const SpectralFn& f, int k, const SpectralDecomposition& dec);

//! Sandwich sum with the B's already rotated into the eigenbasis; result stays rotated.
Mat apply_rotated(const SpectralTable& table, const SpectralDecomposition& dec, std::span<const Mat> bt);

//! Sandwich sum in the original basis.
Mat apply(const SpectralTable& table, const SpectralDecomposition& dec, std::span<const Mat> bs);

Mat sandwich_sum(const SpectralFn& f, const SpectralDecomposition& dec, std::span<const Mat> bs);
inline Mat sandwich_sum(const SpectralFn& f, const SpectralDecomposition& dec, std::initializer_list<Mat> bs) {
  std::vector<Mat> v(bs);
  return sandwich_sum(f, dec, std::span<const Mat>(v));
}

// ----------------------------------------------------------------------------

//! Normalisation g_d and Gaussian moment tensors for a constant metric.
struct GaussianMoments {
  int d = 0;
  double g_d = 0.0;
  RMat g_lower;
  std::vector<std::vector<double>> tensors;  // tensors[p] flattened over d^{2p} indices

  double component(std::span<const int> idx) const;
};

/*! g_d = |g|^{1/2} / (2^d pi^{d/2}) and
    G(g)_{mu_1..mu_2p} = (2p)!/(2^{2p} p!) g_{(mu_1 mu_2} ... g_{mu_{2p-1} mu_{2p})}. */
GaussianMoments gaussian_moments(const RMat& g_inv, int p_max);

//! Factors B_0, ..., B_k for one assignment of the 2p free indices.
using TensorArgument = std::function<std::vector<Mat>(std::span<const int>)>;

/*! g_d sum_idx G(g)_idx B_0 (sum f(r_0..r_k) E_{r_0} B_1 ... B_k E_{r_k}) with f = I_{d/2+p,k}. */
Mat t_kp_apply(int k, int p, const SpectralDecomposition& dec, const GaussianMoments& moments,
               const TensorArgument& arg);

}  // namespace heatcoeff
