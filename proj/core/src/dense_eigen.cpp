#include "heatcoeff/dense_eigen.hpp"

#include "heatcoeff/errors.hpp"

#include <lapacke.h>

#include <string>

namespace heatcoeff {

HermitianEigen hermitian_eigen(const Mat& a) {
  if (a.rows() != a.cols()) throw ValidationError("hermitian_eigen: matrix is not square");
  const lapack_int n = static_cast<lapack_int>(a.rows());
  HermitianEigen r;
  r.vectors = hermitian_part(a);
  r.values.resize(n);
  if (n == 0) return r;
  // Eigen is column-major, matching LAPACK_COL_MAJOR
  const lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'U', n,
                                         reinterpret_cast<lapack_complex_double*>(r.vectors.data()), n,
                                         r.values.data());
  if (info != 0) throw EigenError("zheevd failed with info " + std::to_string(info));
  return r;
}

GeneralEigen general_eigen(const Mat& a) {
  if (a.rows() != a.cols()) throw ValidationError("general_eigen: matrix is not square");
  const lapack_int n = static_cast<lapack_int>(a.rows());
  GeneralEigen r;
  Mat work = a;
  r.values.resize(n);
  r.vectors.resize(n, n);
  if (n == 0) return r;
  const lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'V', n,
                                        reinterpret_cast<lapack_complex_double*>(work.data()), n,
                                        reinterpret_cast<lapack_complex_double*>(r.values.data()), nullptr, n,
                                        reinterpret_cast<lapack_complex_double*>(r.vectors.data()), n);
  if (info != 0) throw EigenError("zgeev failed with info " + std::to_string(info));
  Eigen::PartialPivLU<Mat> lu(r.vectors);
  r.inverse = lu.inverse();
  r.condition = r.vectors.cwiseAbs().colwise().sum().maxCoeff() * r.inverse.cwiseAbs().colwise().sum().maxCoeff();
  return r;
}

}  // namespace heatcoeff
