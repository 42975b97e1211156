#include <cmath>
#include <vector>

#include "abreuflow/error.hpp"
#include "abreuflow/geometry.hpp"

namespace abreuflow {

BlockMetric block_metric(const Jet& u) {
  const InverseHessianJet j = inverse_hessian_jet(u);
  BlockMetric m{};
  double dg[2][4][4] = {};
  double ddg[2][2][4][4] = {};
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      m.g[a][b] = j.H(a, b);
      m.g[a + 2][b + 2] = j.W(a, b);
      m.ginv[a][b] = j.W(a, b);
      m.ginv[a + 2][b + 2] = j.H(a, b);
      for (int k = 0; k < 2; ++k) {
        dg[k][a][b] = j.dH[k](a, b);
        dg[k][a + 2][b + 2] = j.dW[k](a, b);
        for (int l = 0; l < 2; ++l) {
          ddg[k][l][a][b] = j.ddH[k][l](a, b);
          ddg[k][l][a + 2][b + 2] = j.ddW[k][l](a, b);
        }
      }
    }
  // d_e g^{am} = -g^{ap} d_e g_pq g^{qm}
  double dginv[2][4][4] = {};
  for (int e = 0; e < 2; ++e)
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        double s = 0.0;
        for (int p = 0; p < 4; ++p)
          for (int q = 0; q < 4; ++q) s -= m.ginv[a][p] * dg[e][p][q] * m.ginv[q][b];
        dginv[e][a][b] = s;
      }
  auto dgc = [&](int c, int a, int b) { return c < 2 ? dg[c][a][b] : 0.0; };
  auto ddgc = [&](int e, int c, int a, int b) { return c < 2 ? ddg[e][c][a][b] : 0.0; };
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c) {
        double s = 0.0;
        for (int k = 0; k < 4; ++k) s += m.ginv[a][k] * (dgc(b, k, c) + dgc(c, k, b) - dgc(k, b, c));
        m.gamma[a][b][c] = 0.5 * s;
        for (int e = 0; e < 2; ++e) {
          double t = 0.0;
          for (int k = 0; k < 4; ++k) {
            t += dginv[e][a][k] * (dgc(b, k, c) + dgc(c, k, b) - dgc(k, b, c));
            t += m.ginv[a][k] * (ddgc(e, b, k, c) + ddgc(e, c, k, b) - ddgc(e, k, b, c));
          }
          m.dgamma[e][a][b][c] = 0.5 * t;
        }
      }
  return m;
}

Tensor4 riemann_lowered(const BlockMetric& m) {
  auto dG = [&](int e, int a, int b, int c) { return e < 2 ? m.dgamma[e][a][b][c] : 0.0; };
  double up[4][4][4][4];
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d) {
          double s = dG(c, a, d, b) - dG(d, a, c, b);
          for (int e = 0; e < 4; ++e) s += m.gamma[a][c][e] * m.gamma[e][d][b] - m.gamma[a][d][e] * m.gamma[e][c][b];
          up[a][b][c][d] = s;
        }
  Tensor4 r{};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d) {
          double s = 0.0;
          for (int k = 0; k < 4; ++k) s += m.g[a][k] * up[k][b][c][d];
          r[a * 64 + b * 16 + c * 4 + d] = s;
        }
  return r;
}

double tensor_norm(const double* t, int rank, const double ginv[4][4]) {
  std::size_t n = 1;
  for (int i = 0; i < rank; ++i) n *= 4;
  std::vector<double> cur(t, t + n), next(n);
  std::size_t stride = n;
  for (int slot = 0; slot < rank; ++slot) {
    stride /= 4;
    for (std::size_t idx = 0; idx < n; ++idx) {
      const int a = int((idx / stride) % 4);
      const std::size_t base = idx - a * stride;
      double s = 0.0;
      for (int k = 0; k < 4; ++k) s += ginv[a][k] * cur[base + k * stride];
      next[idx] = s;
    }
    cur.swap(next);
  }
  double s = 0.0;
  for (std::size_t idx = 0; idx < n; ++idx) s += cur[idx] * t[idx];
  return std::sqrt(std::max(0.0, s));
}

double rm_christoffel_from_jet(const Jet& u) {
  const BlockMetric m = block_metric(u);
  const Tensor4 r = riemann_lowered(m);
  return tensor_norm(r.data(), 4, m.ginv);
}

bool q_available(const Grid& g, int node) {
  const int i = g.col(node), j = g.row(node);
  for (int dj = -1; dj <= 1; ++dj)
    for (int di = -1; di <= 1; ++di)
      if (!g.is_active(i + di, j + dj)) return false;
  return true;
}

QValue q_from_jets(const Jet jets[9], double h) {
  Tensor4 R[9];
  for (int k = 0; k < 9; ++k) R[k] = riemann_lowered(block_metric(jets[k]));
  const BlockMetric m = block_metric(jets[4]);
  const Tensor4& R0 = R[4];
  auto at = [&](int di, int dj) -> const Tensor4& { return R[(dj + 1) * 3 + (di + 1)]; };

  // partial derivatives of the lowered curvature tensor in x1, x2
  std::vector<double> dR(2 * 256), ddR(4 * 256);
  for (int n = 0; n < 256; ++n) {
    dR[n] = (at(1, 0)[n] - at(-1, 0)[n]) / (2 * h);
    dR[256 + n] = (at(0, 1)[n] - at(0, -1)[n]) / (2 * h);
    ddR[n] = (at(1, 0)[n] - 2 * R0[n] + at(-1, 0)[n]) / (h * h);
    ddR[3 * 256 + n] = (at(0, 1)[n] - 2 * R0[n] + at(0, -1)[n]) / (h * h);
    const double xy = (at(1, 1)[n] - at(1, -1)[n] - at(-1, 1)[n] + at(-1, -1)[n]) / (4 * h * h);
    ddR[256 + n] = xy;
    ddR[2 * 256 + n] = xy;
  }
  const auto& G = m.gamma;
  auto dRe = [&](int e, int n) { return e < 2 ? dR[e * 256 + n] : 0.0; };

  // nabla_e R_abcd, index e*256 + abcd
  auto slot_sum = [&](const double* T, int e, int a, int b, int c, int d, auto&& conn) {
    double s = 0.0;
    for (int k = 0; k < 4; ++k) {
      s += conn(k, e, a) * T[k * 64 + b * 16 + c * 4 + d];
      s += conn(k, e, b) * T[a * 64 + k * 16 + c * 4 + d];
      s += conn(k, e, c) * T[a * 64 + b * 16 + k * 4 + d];
      s += conn(k, e, d) * T[a * 64 + b * 16 + c * 4 + k];
    }
    return s;
  };
  auto gam = [&](int k, int e, int a) { return G[k][e][a]; };

  std::vector<double> nR(4 * 256);
  for (int e = 0; e < 4; ++e)
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int c = 0; c < 4; ++c)
          for (int d = 0; d < 4; ++d) {
            const int n = a * 64 + b * 16 + c * 4 + d;
            nR[e * 256 + n] = dRe(e, n) - slot_sum(R0.data(), e, a, b, c, d, gam);
          }

  // nabla_f nabla_e R_abcd, index f*1024 + e*256 + abcd
  std::vector<double> nnR(4 * 1024);
  for (int f = 0; f < 4; ++f)
    for (int e = 0; e < 4; ++e)
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          for (int c = 0; c < 4; ++c)
            for (int d = 0; d < 4; ++d) {
              const int n = a * 64 + b * 16 + c * 4 + d;
              double s = 0.0;
              if (f < 2) {
                // d_f (nabla_e R) = d_f d_e R - (d_f Gamma) R - Gamma d_f R
                s = e < 2 ? ddR[(f * 2 + e) * 256 + n] : 0.0;
                auto dgam = [&](int k, int ee, int aa) { return m.dgamma[f][k][ee][aa]; };
                s -= slot_sum(R0.data(), e, a, b, c, d, dgam);
                s -= slot_sum(&dR[f * 256], e, a, b, c, d, gam);
              }
              for (int k = 0; k < 4; ++k) s -= G[k][f][e] * nR[k * 256 + n];
              // remaining slots a, b, c, d of nabla_e R
              const double* T = &nR[e * 256];
              s -= slot_sum(T, f, a, b, c, d, gam);
              nnR[f * 1024 + e * 256 + n] = s;
            }

  QValue q;
  q.rm = tensor_norm(R0.data(), 4, m.ginv);
  q.grad_rm = tensor_norm(nR.data(), 5, m.ginv);
  q.hess_rm = tensor_norm(nnR.data(), 6, m.ginv);
  q.q = q.rm + std::cbrt(q.grad_rm * q.grad_rm) + std::sqrt(q.hess_rm);
  return q;
}

QValue q_quantity(const PotentialField& f, int node) {
  const Grid& g = *f.grid;
  if (!q_available(g, node)) throw Error(Errc::kQUnavailable, "Q unavailable at node " + std::to_string(node));
  Jet jets[9];
  const int i = g.col(node), j = g.row(node);
  for (int dj = -1; dj <= 1; ++dj)
    for (int di = -1; di <= 1; ++di) jets[(dj + 1) * 3 + (di + 1)] = derivatives_at(f, g.index(i + di, j + dj), 4);
  return q_from_jets(jets, g.h);
}

}  // namespace abreuflow
