#include <cmath>

#include "abreuflow/error.hpp"
#include "abreuflow/geometry.hpp"

namespace abreuflow {

namespace {

Mat2 sym(double a, double b, double c) { return {a, b, b, c}; }

}  // namespace

InverseHessianJet inverse_hessian_jet(const Jet& u) {
  InverseHessianJet j;
  const Sym2 h = u.hessian();
  const InverseCofactor ic = inverse_and_cofactor(h);
  j.H = Mat2::from(h);
  j.W = Mat2::from(ic.inverse);
  for (int k = 0; k < 2; ++k) {
    j.dH[k] = sym(u.d3[k], u.d3[k + 1], u.d3[k + 2]);
    j.dW[k] = -1.0 * (j.W * j.dH[k] * j.W);
  }
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l) {
      const int s = k + l;
      j.ddH[k][l] = sym(u.d4[s], u.d4[s + 1], u.d4[s + 2]);
      const Mat2 a = j.W * j.dH[k] * j.W * j.dH[l] * j.W;
      const Mat2 b = j.W * j.dH[l] * j.W * j.dH[k] * j.W;
      j.ddW[k][l] = a + b - j.W * j.ddH[k][l] * j.W;
    }
  return j;
}

double abreu_from_jet(const Jet& u) {
  const Sym2 h = u.hessian();
  if (!(eigen(h).min > 0.0)) throw MetricDegenerate(eigen(h).min);
  return abreu_closed_form(h.xx, h.xy, h.yy, u.d3, u.d4);
}

double abreu_cofactor_from_jet(const Jet& u) {
  const Sym2 h = u.hessian();
  if (!(eigen(h).min > 0.0)) throw MetricDegenerate(eigen(h).min);
  const double uxx = u.d2[0], uxy = u.d2[1], uyy = u.d2[2];
  const double D = uxx * uyy - uxy * uxy;
  // derivatives of the Hessian entries: index k = derivative direction
  auto dxx = [&](int k) { return u.d3[k]; };
  auto dxy = [&](int k) { return u.d3[k + 1]; };
  auto dyy = [&](int k) { return u.d3[k + 2]; };
  auto ddxx = [&](int k, int l) { return u.d4[k + l]; };
  auto ddxy = [&](int k, int l) { return u.d4[k + l + 1]; };
  auto ddyy = [&](int k, int l) { return u.d4[k + l + 2]; };
  double Dk[2];
  for (int k = 0; k < 2; ++k) Dk[k] = dxx(k) * uyy + uxx * dyy(k) - 2 * uxy * dxy(k);
  double inv[2][2];
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l) {
      const double Dkl = ddxx(k, l) * uyy + dxx(k) * dyy(l) + dxx(l) * dyy(k) + uxx * ddyy(k, l) -
                         2 * (dxy(k) * dxy(l) + uxy * ddxy(k, l));
      inv[k][l] = 2 * Dk[k] * Dk[l] / (D * D * D) - Dkl / (D * D);
    }
  const double U[2][2] = {{uyy, -uxy}, {-uxy, uxx}};
  double a = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) a -= U[i][j] * inv[i][j];
  return a;
}

double rm_contraction_from_jet(const Jet& u) {
  const InverseHessianJet j = inverse_hessian_jet(u);
  double s = 0.0;
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l)
      for (int r = 0; r < 2; ++r)
        for (int q = 0; q < 2; ++q)
          s += j.W(k, r) * j.W(l, q) * (j.ddW[k][l] * j.H * j.ddW[r][q] * j.H).trace();
  return std::sqrt(std::max(0.0, s));
}

AbreuValue abreu_scalar(const PotentialField& f, int node) {
  if (!f.grid->is_active(node)) throw Error(Errc::kStencilOutOfDomain, "stencil out of domain: node is not active");
  const Jet u = derivatives_at(f, node, 4);
  return {abreu_from_jet(u), abreu_cofactor_from_jet(u)};
}

double curvature_norm(const PotentialField& f, int node) {
  if (!f.grid->is_active(node)) throw Error(Errc::kStencilOutOfDomain, "stencil out of domain: node is not active");
  return rm_contraction_from_jet(derivatives_at(f, node, 4));
}

namespace {

int nearest_active(const Grid& g, int node) {
  if (g.is_active(node)) return node;
  const int i = g.col(node), j = g.row(node);
  const int reach = g.collar_width + 4;
  for (int r = 1; r <= reach; ++r) {
    int best = -1;
    double best_d = INFINITY;
    for (int dj = -r; dj <= r; ++dj)
      for (int di = -r; di <= r; ++di) {
        if (std::max(std::abs(di), std::abs(dj)) != r || !g.is_active(i + di, j + dj)) continue;
        const double d = double(di) * di + double(dj) * dj;
        if (d < best_d) {
          best_d = d;
          best = g.index(i + di, j + dj);
        }
      }
    if (best >= 0) return best;
  }
  return -1;
}

}  // namespace

AverageScalar average_scalar(const PotentialField& f) {
  const Grid& g = *f.grid;
  const DelzantPolygon& p = *f.polygon;
  AverageScalar out;
  double sum = 0.0;
  for (int idx : g.active) sum += abreu_from_jet(derivatives_at(f, idx, 4));
  out.active_mean = g.active.empty() ? 0.0 : sum / double(g.active.size());

  double integral = 0.0;
  const double r = 0.5 * g.h;
  for (int idx = 0; idx < g.size(); ++idx) {
    if (!g.in_polygon(idx)) continue;
    const Vec2 c = g.position(idx);
    std::vector<Vec2> cell = {{c.x - r, c.y - r}, {c.x + r, c.y - r}, {c.x + r, c.y + r}, {c.x - r, c.y + r}};
    for (const auto& e : p.edges) {
      cell = clip_half_plane(cell, e.normal(), e.c);
      if (cell.size() < 3) break;
    }
    if (cell.size() < 3) continue;
    const double area = polygon_area(cell);
    if (!(area > 0.0)) continue;
    const Vec2 q = polygon_centroid(cell);
    Jet u = reference_eval(f, q, 4);
    const int src = nearest_active(g, idx);
    if (src >= 0) {
      Jet vj = v_derivatives_at(f, src, 4);
      vj.d0 = 0.0;
      vj.d1[0] = vj.d1[1] = 0.0;
      u += vj;
    }
    integral += area * abreu_from_jet(u);
  }
  out.integral = integral;
  out.quadrature_mean = integral / p.area();
  out.lattice_prediction = 2.0 * boundary_sigma_total(p) / p.area();
  return out;
}

}  // namespace abreuflow
