#pragma once

#include <memory>
#include <string>
#include <vector>

#include "abreuflow/grid.hpp"
#include "abreuflow/jet.hpp"
#include "abreuflow/polytope.hpp"

namespace abreuflow {

// Analytic part of the potential: the Guillemin potential of the polygon, or nothing.
enum class Reference { kGuillemin, kNone };

std::string to_string(Reference r);
Reference reference_from_string(const std::string& s);

struct PotentialField {
  std::shared_ptr<const DelzantPolygon> polygon;
  std::shared_ptr<const Grid> grid;
  std::vector<double> v;  // one value per grid node; outside nodes carry 0
  Reference reference = Reference::kGuillemin;

  double h() const { return grid->h; }
};

PotentialField make_field(std::shared_ptr<const DelzantPolygon> polygon, std::shared_ptr<const Grid> grid,
                          Reference reference = Reference::kGuillemin);

// u0 = 1/2 sum_k l_k log l_k and its derivatives up to `order`; throws "boundary singularity" outside.
Jet guillemin_eval(const DelzantPolygon& polygon, Vec2 x, int order);
Jet reference_eval(const PotentialField& f, Vec2 x, int order);

// Derivatives of v at a node: centered stencils at active nodes (order <= 4),
// shifted windows of in-polygon nodes elsewhere (order <= 2).
Jet v_derivatives_at(const PotentialField& f, int node, int order);
// Full derivatives of u = u0 + v at a node, orders 1..order (d0 left at v + u0).
Jet derivatives_at(const PotentialField& f, int node, int order);

struct InverseCofactor {
  Sym2 inverse;
  Sym2 cofactor;
  double det = 0.0;
};

// Throws MetricDegenerate when the input is not positive definite.
InverseCofactor inverse_and_cofactor(const Sym2& hessian);

// u~(x) = lambda * u(x / lambda + center) on the polygon lambda (P - center).
PotentialField rescale_potential(const PotentialField& f, double lambda, Vec2 center);

// Subtracts the affine function matching v and Dv at the node nearest the polygon centroid.
void normalize_affine(PotentialField& f);

// Smallest eigenvalue of D^2 u over the active nodes.
double min_active_eigenvalue(const PotentialField& f);

}  // namespace abreuflow
