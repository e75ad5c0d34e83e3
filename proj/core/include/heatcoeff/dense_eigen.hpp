#pragma once

/*! \file
    \brief Dense complex eigensolvers (LAPACK zheevd and zgeev).
*/

#include "heatcoeff/linalg.hpp"

namespace heatcoeff {

struct HermitianEigen {
  RVec values;  // ascending
  Mat vectors;  // orthonormal columns
};

//! Hermitian part of \c a is decomposed. Throws EigenError on LAPACK failure.
HermitianEigen hermitian_eigen(const Mat& a);

struct GeneralEigen {
  CVec values;
  Mat vectors;  // right eigenvectors as columns
  Mat inverse;  // vectors^{-1}
  double condition = 0.0;  // estimate of cond(vectors) in the 1-norm
};

//! Diagonalisation of a general complex matrix. Throws EigenError on failure.
GeneralEigen general_eigen(const Mat& a);

}  // namespace heatcoeff
