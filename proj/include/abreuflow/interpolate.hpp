#pragma once

#include <vector>

#include "abreuflow/field.hpp"

namespace abreuflow {

// Off-node evaluation of Du and D^2u: analytic reference part plus a bicubic
// (Catmull-Rom) interpolant of node tables of Dv and D^2v; bilinear near the boundary.
class FieldInterpolator {
 public:
  explicit FieldInterpolator(const PotentialField& field);

  Vec2 gradient(Vec2 x) const;
  Sym2 hessian(Vec2 x) const;
  // Both at once; cheaper than two calls.
  void evaluate(Vec2 x, Vec2* gradient, Sym2* hessian) const;

  const PotentialField& field() const { return *field_; }

 private:
  bool node_ok(int i, int j) const;
  void perturbation(Vec2 x, double out[5]) const;

  const PotentialField* field_;
  std::vector<double> table_;  // 5 values per node: vx, vy, vxx, vxy, vyy
  std::vector<unsigned char> ok_;
};

}  // namespace abreuflow
