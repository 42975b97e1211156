#include "abreuflow/grid.hpp"

#include <cmath>

#include "abreuflow/error.hpp"

namespace abreuflow {

double clipped_cell_area(const DelzantPolygon& polygon, Vec2 c, double h, double epsilon) {
  const double r = 0.5 * h;
  std::vector<Vec2> cell = {{c.x - r, c.y - r}, {c.x + r, c.y - r}, {c.x + r, c.y + r}, {c.x - r, c.y + r}};
  for (const auto& e : polygon.edges) {
    cell = clip_half_plane(cell, e.normal(), e.c + epsilon * e.normal_length());
    if (cell.size() < 3) return 0.0;
  }
  return std::max(0.0, polygon_area(cell));
}

Grid make_grid(const DelzantPolygon& polygon, Vec2 origin, double h, int nx, int ny, int collar_width) {
  if (!(h > 0)) throw Error(Errc::kGridTooCoarse, "grid spacing must be positive");
  if (collar_width < 2) throw Error(Errc::kGridTooCoarse, "collar width must be at least 2");
  Grid g;
  g.origin = origin;
  g.h = h;
  g.nx = nx;
  g.ny = ny;
  g.collar_width = collar_width;
  g.mask.assign(g.size(), NodeClass::kOutside);
  g.margin.assign(g.size(), 0.0);
  g.cell_area.assign(g.size(), 0.0);
  const double tol = 1e-9 * h;
  for (int idx = 0; idx < g.size(); ++idx) {
    g.margin[idx] = polygon.margin(g.position(idx));
    if (g.margin[idx] >= -tol) g.mask[idx] = NodeClass::kCollar;
  }
  std::vector<NodeClass> out = g.mask;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int idx = g.index(i, j);
      if (g.mask[idx] == NodeClass::kOutside) continue;
      g.cell_area[idx] = clipped_cell_area(polygon, g.position(idx), h, 0.0);
      if (g.margin[idx] < collar_width * h - tol) continue;
      bool box = true;
      for (int dj = -2; dj <= 2 && box; ++dj)
        for (int di = -2; di <= 2 && box; ++di) box = g.in_polygon(i + di, j + dj);
      if (box) out[idx] = NodeClass::kActive;
    }
  }
  g.mask = std::move(out);
  for (int idx = 0; idx < g.size(); ++idx)
    if (g.mask[idx] == NodeClass::kActive) g.active.push_back(idx);
  return g;
}

Grid build_grid(const DelzantPolygon& polygon, double h, int collar_width) {
  if (!(h > 0)) throw Error(Errc::kGridTooCoarse, "grid spacing must be positive");
  const double r = polygon.inradius();
  if (h > r) throw Error(Errc::kGridTooCoarse, "grid too coarse: h exceeds the inradius");
  Vec2 lo = polygon.vertices[0], hi = polygon.vertices[0];
  for (const auto& v : polygon.vertices) {
    lo.x = std::min(lo.x, v.x);
    lo.y = std::min(lo.y, v.y);
    hi.x = std::max(hi.x, v.x);
    hi.y = std::max(hi.y, v.y);
  }
  const int nx = int(std::floor((hi.x - lo.x) / h + 1e-9)) + 1;
  const int ny = int(std::floor((hi.y - lo.y) / h + 1e-9)) + 1;
  return make_grid(polygon, lo, h, nx, ny, collar_width);
}

}  // namespace abreuflow
