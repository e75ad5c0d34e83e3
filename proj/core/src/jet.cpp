#include "heatcoeff/jet.hpp"

namespace heatcoeff {

std::vector<RJet> inverse_entries(const std::vector<RJet>& e, int n) {
  const int dim = e.front().dim;
  const int order = e.front().order;
  MatJet g(Mat::Zero(n, n), dim, order);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const RJet& x = e[static_cast<size_t>(i) * n + j];
      g.v(i, j) = x.v;
      for (int m = 0; m < dim && order >= 1; ++m) g.d[m](i, j) = x.d[m];
      for (size_t k = 0; order >= 2 && k < x.dd.size(); ++k) g.dd[k](i, j) = x.dd[k];
    }
  const MatJet G = inverse(g);
  std::vector<RJet> out(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      RJet x(G.v(i, j).real(), dim, order);
      for (int m = 0; m < dim && order >= 1; ++m) x.d[m] = G.d[m](i, j).real();
      for (size_t k = 0; order >= 2 && k < G.dd.size(); ++k) x.dd[k] = G.dd[k](i, j).real();
      out[static_cast<size_t>(i) * n + j] = x;
    }
  return out;
}

}  // namespace heatcoeff
