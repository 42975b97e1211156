#include "abreuflow/stencil.hpp"

#include <stdexcept>

namespace abreuflow {

std::vector<double> fd_weights(double z, const std::vector<double>& x, int order) {
  const int n = int(x.size()) - 1;
  if (order > n) throw std::invalid_argument("fd_weights: too few nodes");
  std::vector<std::vector<double>> c(n + 1, std::vector<double>(order + 1, 0.0));
  double c1 = 1.0;
  double c4 = x[0] - z;
  c[0][0] = 1.0;
  for (int i = 1; i <= n; ++i) {
    const int mn = std::min(i, order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - z;
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n + 1);
  for (int i = 0; i <= n; ++i) w[i] = c[i][order];
  return w;
}

const Stencil1D& centered_stencil(int order) {
  static const Stencil1D table[5] = {
      {{0}, {1.0}},
      {{-1, 0, 1}, {-0.5, 0.0, 0.5}},
      {{-1, 0, 1}, {1.0, -2.0, 1.0}},
      {{-2, -1, 0, 1, 2}, {-0.5, 1.0, 0.0, -1.0, 0.5}},
      {{-2, -1, 0, 1, 2}, {1.0, -4.0, 6.0, -4.0, 1.0}},
  };
  if (order < 0 || order > 4) throw std::invalid_argument("centered_stencil: order out of range");
  return table[order];
}

bool shifted_stencil(int order, int lo, int hi, Stencil1D& out) {
  if (order == 0) {
    out = centered_stencil(0);
    return lo <= 0 && hi >= 0;
  }
  if (lo <= -1 && hi >= 1) {
    out = centered_stencil(order);
    if (order <= 2) return true;
    if (lo <= -2 && hi >= 2) return true;
  }
  if (order > 2) return false;
  // one-sided window: order+2 points gives second-order accuracy
  const int width = order + 2;
  int start;
  if (hi - lo + 1 < width) return false;
  if (lo > -1) start = lo;            // window pushed right
  else start = hi - width + 1;        // window pushed left
  if (start > 0 || start + width - 1 < 0) return false;
  out.offsets.clear();
  std::vector<double> xs;
  for (int k = 0; k < width; ++k) {
    out.offsets.push_back(start + k);
    xs.push_back(start + k);
  }
  out.weights = fd_weights(0.0, xs, order);
  return true;
}

}  // namespace abreuflow
