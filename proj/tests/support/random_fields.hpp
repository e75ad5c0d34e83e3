#pragma once

// Random jets and operator fields shared by the unit tests and the acceptance suite.

#include "heatcoeff/geometry.hpp"
#include "heatcoeff/linalg.hpp"

#include <random>
#include <vector>

namespace heatcoeff::testing {

inline RMat random_symmetric(int d, Rng& rng, double scale) {
  std::normal_distribution<double> nd(0.0, scale);
  RMat m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) m(i, j) = m(j, i) = nd(rng);
  return m;
}

//! Inverse metric near the identity with random first and second derivatives.
inline MetricJet random_metric_jet(int d, Rng& rng, double scale = 0.2) {
  RMat g = RMat::Identity(d, d) + random_symmetric(d, rng, 0.5 * scale);
  g = 0.5 * (g + g.transpose());
  std::vector<RMat> dg(d), ddg(static_cast<size_t>(d) * d);
  for (int r = 0; r < d; ++r) dg[r] = random_symmetric(d, rng, scale);
  for (int r = 0; r < d; ++r)
    for (int s = r; s < d; ++s) {
      const RMat m = random_symmetric(d, rng, scale);
      ddg[static_cast<size_t>(r) * d + s] = m;
      ddg[static_cast<size_t>(s) * d + r] = m;
    }
  return MetricJet::from_arrays(g, dg, ddg);
}

//! Matrix jet with symmetric second derivatives; Hermitian entries when requested.
inline MatJet random_mat_jet(int n, int d, int order, Rng& rng, bool hermitian, double scale = 0.3) {
  auto draw = [&] { return hermitian ? random_hermitian(n, rng, scale) : random_matrix(n, rng, scale); };
  MatJet j(draw(), d, order);
  for (int mu = 0; mu < d && order >= 1; ++mu) j.d[mu] = draw();
  for (int mu = 0; mu < d && order >= 2; ++mu)
    for (int nu = mu; nu < d; ++nu) {
      const Mat m = draw();
      j.dd_at(mu, nu) = m;
      j.dd_at(nu, mu) = m;
    }
  return j;
}

//! Positive u with spectrum in [lo, hi] and Hermitian derivatives.
inline MatJet random_positive_jet(int n, int d, Rng& rng, double lo = 0.5, double hi = 3.0) {
  MatJet u = random_mat_jet(n, d, 2, rng, true);
  u.v = random_positive(n, rng, lo, hi);
  return u;
}

inline PointFieldsUVW random_uvw(int n, int d, Rng& rng) {
  PointFieldsUVW f;
  f.u = random_positive_jet(n, d, rng);
  for (int mu = 0; mu < d; ++mu) f.v.push_back(random_mat_jet(n, d, 1, rng, false));
  f.w = random_mat_jet(n, d, 0, rng, false);
  return f;
}

inline std::vector<MatJet> random_connection(int n, int d, Rng& rng, double scale = 0.3) {
  std::vector<MatJet> A;
  for (int mu = 0; mu < d; ++mu) {
    MatJet a(random_antihermitian(n, rng, scale), d, 1);
    for (int nu = 0; nu < d; ++nu) a.d[nu] = random_antihermitian(n, rng, scale);
    A.push_back(a);
  }
  return A;
}

inline PointFieldsUPQ random_upq(int n, int d, Rng& rng) {
  PointFieldsUPQ f;
  f.u = random_positive_jet(n, d, rng);
  for (int mu = 0; mu < d; ++mu) f.p.push_back(random_mat_jet(n, d, 1, rng, false));
  f.q = random_mat_jet(n, d, 0, rng, false);
  f.A = random_connection(n, d, rng);
  return f;
}

}  // namespace heatcoeff::testing
