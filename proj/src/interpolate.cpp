#include "abreuflow/interpolate.hpp"

#include <cmath>

#include "abreuflow/error.hpp"

namespace abreuflow {

FieldInterpolator::FieldInterpolator(const PotentialField& field) : field_(&field) {
  const Grid& g = *field.grid;
  table_.assign(5 * g.size(), 0.0);
  ok_.assign(g.size(), 0);
  for (int idx = 0; idx < g.size(); ++idx) {
    if (!g.in_polygon(idx)) continue;
    try {
      const Jet j = v_derivatives_at(field, idx, 2);
      double* t = &table_[5 * idx];
      t[0] = j.d1[0];
      t[1] = j.d1[1];
      t[2] = j.d2[0];
      t[3] = j.d2[1];
      t[4] = j.d2[2];
      ok_[idx] = 1;
    } catch (const Error&) {
    }
  }
}

bool FieldInterpolator::node_ok(int i, int j) const {
  const Grid& g = *field_->grid;
  return g.valid(i, j) && ok_[g.index(i, j)];
}

namespace {

void catmull_rom(double t, double w[4]) {
  const double t2 = t * t, t3 = t2 * t;
  w[0] = 0.5 * (-t3 + 2 * t2 - t);
  w[1] = 0.5 * (3 * t3 - 5 * t2 + 2);
  w[2] = 0.5 * (-3 * t3 + 4 * t2 + t);
  w[3] = 0.5 * (t3 - t2);
}

}  // namespace

void FieldInterpolator::perturbation(Vec2 x, double out[5]) const {
  const Grid& g = *field_->grid;
  const double fx = (x.x - g.origin.x) / g.h, fy = (x.y - g.origin.y) / g.h;
  int i0 = int(std::floor(fx)), j0 = int(std::floor(fy));
  // points on the last grid line belong to the cell below
  if (i0 == g.nx - 1) --i0;
  if (j0 == g.ny - 1) --j0;
  const double tx = fx - i0, ty = fy - j0;
  for (int k = 0; k < 5; ++k) out[k] = 0.0;

  bool cubic = true;
  for (int b = -1; b <= 2 && cubic; ++b)
    for (int a = -1; a <= 2 && cubic; ++a) cubic = node_ok(i0 + a, j0 + b);
  if (cubic) {
    double wx[4], wy[4];
    catmull_rom(tx, wx);
    catmull_rom(ty, wy);
    for (int b = 0; b < 4; ++b)
      for (int a = 0; a < 4; ++a) {
        const double w = wx[a] * wy[b];
        const double* t = &table_[5 * g.index(i0 + a - 1, j0 + b - 1)];
        for (int k = 0; k < 5; ++k) out[k] += w * t[k];
      }
    return;
  }
  if (node_ok(i0, j0) && node_ok(i0 + 1, j0) && node_ok(i0, j0 + 1) && node_ok(i0 + 1, j0 + 1)) {
    const double w[4] = {(1 - tx) * (1 - ty), tx * (1 - ty), (1 - tx) * ty, tx * ty};
    const int ids[4] = {g.index(i0, j0), g.index(i0 + 1, j0), g.index(i0, j0 + 1), g.index(i0 + 1, j0 + 1)};
    for (int n = 0; n < 4; ++n)
      for (int k = 0; k < 5; ++k) out[k] += w[n] * table_[5 * ids[n] + k];
    return;
  }
  const int ni = int(std::lround(fx)), nj = int(std::lround(fy));
  if (node_ok(ni, nj)) {
    for (int k = 0; k < 5; ++k) out[k] = table_[5 * g.index(ni, nj) + k];
    return;
  }
  throw Error(Errc::kStencilOutOfDomain, "stencil out of domain: no interpolation data near point");
}

void FieldInterpolator::evaluate(Vec2 x, Vec2* gradient, Sym2* hessian) const {
  double p[5];
  perturbation(x, p);
  const Jet r = reference_eval(*field_, x, hessian ? 2 : 1);
  if (gradient) *gradient = {r.d1[0] + p[0], r.d1[1] + p[1]};
  if (hessian) *hessian = {r.d2[0] + p[2], r.d2[1] + p[3], r.d2[2] + p[4]};
}

Vec2 FieldInterpolator::gradient(Vec2 x) const {
  Vec2 g;
  evaluate(x, &g, nullptr);
  return g;
}

Sym2 FieldInterpolator::hessian(Vec2 x) const {
  Sym2 h;
  evaluate(x, nullptr, &h);
  return h;
}

}  // namespace abreuflow
