#include "abreuflow/field.hpp"

#include <cmath>

#include "abreuflow/error.hpp"
#include "abreuflow/stencil.hpp"

namespace abreuflow {

std::string to_string(Reference r) { return r == Reference::kGuillemin ? "guillemin" : "none"; }

Reference reference_from_string(const std::string& s) {
  if (s == "guillemin") return Reference::kGuillemin;
  if (s == "none") return Reference::kNone;
  throw Error(Errc::kConfigParse, "unknown reference '" + s + "' (expected guillemin or none)");
}

PotentialField make_field(std::shared_ptr<const DelzantPolygon> polygon, std::shared_ptr<const Grid> grid,
                          Reference reference) {
  PotentialField f;
  f.polygon = std::move(polygon);
  f.grid = std::move(grid);
  f.v.assign(f.grid->size(), 0.0);
  f.reference = reference;
  return f;
}

Jet guillemin_eval(const DelzantPolygon& polygon, Vec2 x, int order) {
  Jet j;
  for (const auto& e : polygon.edges) {
    const double l = e.eval(x);
    if (!(l > 0.0)) throw Error(Errc::kBoundarySingularity, "boundary singularity: point on or outside the polygon");
    const double a = e.nx, b = e.ny;
    j.d0 += 0.5 * l * std::log(l);
    if (order < 1) continue;
    const double g = 0.5 * (std::log(l) + 1.0);
    j.d1[0] += a * g;
    j.d1[1] += b * g;
    if (order < 2) continue;
    const double c2 = 0.5 / l;
    j.d2[0] += c2 * a * a;
    j.d2[1] += c2 * a * b;
    j.d2[2] += c2 * b * b;
    if (order < 3) continue;
    const double c3 = -0.5 / (l * l);
    j.d3[0] += c3 * a * a * a;
    j.d3[1] += c3 * a * a * b;
    j.d3[2] += c3 * a * b * b;
    j.d3[3] += c3 * b * b * b;
    if (order < 4) continue;
    const double c4 = 1.0 / (l * l * l);
    j.d4[0] += c4 * a * a * a * a;
    j.d4[1] += c4 * a * a * a * b;
    j.d4[2] += c4 * a * a * b * b;
    j.d4[3] += c4 * a * b * b * b;
    j.d4[4] += c4 * b * b * b * b;
  }
  return j;
}

Jet reference_eval(const PotentialField& f, Vec2 x, int order) {
  if (f.reference == Reference::kNone) return Jet{};
  return guillemin_eval(*f.polygon, x, order);
}

namespace {

double apply_tensor(const PotentialField& f, int node, const Stencil1D& sx, const Stencil1D& sy) {
  const Grid& g = *f.grid;
  double s = 0.0;
  for (std::size_t b = 0; b < sy.offsets.size(); ++b) {
    if (sy.weights[b] == 0.0) continue;
    double row = 0.0;
    const int base = node + sy.offsets[b] * g.nx;
    for (std::size_t a = 0; a < sx.offsets.size(); ++a) {
      if (sx.weights[a] == 0.0) continue;
      row += sx.weights[a] * f.v[base + sx.offsets[a]];
    }
    s += sy.weights[b] * row;
  }
  return s;
}

bool window_fits(const Grid& g, int i, int j, const Stencil1D& sx, const Stencil1D& sy) {
  for (int oy : sy.offsets)
    for (int ox : sx.offsets)
      if (!g.in_polygon(i + ox, j + oy)) return false;
  return true;
}

void axis_range(const Grid& g, int i, int j, int di, int dj, int& lo, int& hi) {
  lo = 0;
  hi = 0;
  while (lo > -3 && g.in_polygon(i + (lo - 1) * di, j + (lo - 1) * dj)) --lo;
  while (hi < 3 && g.in_polygon(i + (hi + 1) * di, j + (hi + 1) * dj)) ++hi;
}

}  // namespace

Jet v_derivatives_at(const PotentialField& f, int node, int order) {
  const Grid& g = *f.grid;
  const int i = g.col(node), j = g.row(node);
  Jet jet;
  jet.d0 = f.v[node];
  const double h = g.h;
  if (g.mask[node] == NodeClass::kActive) {
    double scale = 1.0;
    for (int m = 1; m <= order; ++m) {
      scale *= h;
      double* out = m == 1 ? jet.d1 : m == 2 ? jet.d2 : m == 3 ? jet.d3 : jet.d4;
      for (int k = 0; k <= m; ++k)
        out[k] = apply_tensor(f, node, centered_stencil(m - k), centered_stencil(k)) / scale;
    }
    return jet;
  }
  if (order > 2) throw Error(Errc::kStencilOutOfDomain, "stencil out of domain: high-order derivative off the active region");
  if (g.mask[node] == NodeClass::kOutside) throw Error(Errc::kStencilOutOfDomain, "stencil out of domain: node outside the polygon");
  int xlo, xhi, ylo, yhi;
  axis_range(g, i, j, 1, 0, xlo, xhi);
  axis_range(g, i, j, 0, 1, ylo, yhi);
  Stencil1D sx[3], sy[3];
  bool okx[3], oky[3];
  for (int m = 0; m <= 2; ++m) {
    okx[m] = shifted_stencil(m, xlo, xhi, sx[m]);
    oky[m] = shifted_stencil(m, ylo, yhi, sy[m]);
  }
  double scale = 1.0;
  for (int m = 1; m <= order; ++m) {
    scale *= h;
    double* out = m == 1 ? jet.d1 : jet.d2;
    for (int k = 0; k <= m; ++k) {
      const int a = m - k;
      if (!okx[a] || !oky[k] || !window_fits(g, i, j, sx[a], sy[k]))
        throw Error(Errc::kStencilOutOfDomain, "stencil out of domain at node " + std::to_string(node));
      out[k] = apply_tensor(f, node, sx[a], sy[k]) / scale;
    }
  }
  return jet;
}

Jet derivatives_at(const PotentialField& f, int node, int order) {
  Jet j = v_derivatives_at(f, node, order);
  j += reference_eval(f, f.grid->position(node), order);
  return j;
}

InverseCofactor inverse_and_cofactor(const Sym2& m) {
  const SymEigen e = eigen(m);
  if (!(e.min > 0.0)) throw MetricDegenerate(e.min);
  InverseCofactor r;
  r.det = m.det();
  r.cofactor = {m.yy, -m.xy, m.xx};
  r.inverse = (1.0 / r.det) * r.cofactor;
  return r;
}

PotentialField rescale_potential(const PotentialField& f, double lambda, Vec2 center) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw Error(Errc::kInvalidScale, "invalid scale: lambda must be positive");
  const DelzantPolygon& p = *f.polygon;
  if (p.margin(center) <= 0.0) throw Error(Errc::kInvalidScale, "invalid scale: center must lie inside the polygon");
  std::vector<Edge> edges = p.edges;
  for (auto& e : edges) e.c = lambda * (e.c - dot(center, e.normal()));
  auto poly = std::make_shared<const DelzantPolygon>(make_polygon(edges));
  const Grid& g = *f.grid;
  auto grid = std::make_shared<const Grid>(
      make_grid(*poly, lambda * (g.origin - center), lambda * g.h, g.nx, g.ny, g.collar_width));
  PotentialField out = make_field(poly, grid, f.reference);
  const double shift = f.reference == Reference::kGuillemin ? 0.5 * lambda * std::log(lambda) : 0.0;
  for (int idx = 0; idx < g.size(); ++idx) {
    if (!grid->in_polygon(idx)) continue;
    const Vec2 y = g.position(idx);
    double sum_l = 0.0;
    for (const auto& e : p.edges) sum_l += e.eval(y);
    out.v[idx] = lambda * f.v[idx] - shift * sum_l;
  }
  return out;
}

void normalize_affine(PotentialField& f) {
  const Grid& g = *f.grid;
  const Vec2 c = f.polygon->centroid();
  int best = -1;
  double best_d = INFINITY;
  for (int idx = 0; idx < g.size(); ++idx) {
    if (!g.in_polygon(idx)) continue;
    const double d = norm(g.position(idx) - c);
    if (d < best_d) {
      best_d = d;
      best = idx;
    }
  }
  if (best < 0) return;
  const Jet j = v_derivatives_at(f, best, 1);
  const Vec2 x0 = g.position(best);
  for (int idx = 0; idx < g.size(); ++idx) {
    if (!g.in_polygon(idx)) continue;
    const Vec2 d = g.position(idx) - x0;
    f.v[idx] -= j.d0 + j.d1[0] * d.x + j.d1[1] * d.y;
  }
}

double min_active_eigenvalue(const PotentialField& f) {
  double m = INFINITY;
  for (int idx : f.grid->active) m = std::min(m, eigen(derivatives_at(f, idx, 2).hessian()).min);
  return m;
}

}  // namespace abreuflow
