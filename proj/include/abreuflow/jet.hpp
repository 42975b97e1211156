#pragma once

#include "abreuflow/linalg.hpp"

namespace abreuflow {

// Partial derivatives of a scalar function of (x1, x2) up to fourth order.
// dm[k] is the m-th derivative with k differentiations in x2 and m-k in x1.
struct Jet {
  double d0 = 0.0;
  double d1[2] = {0, 0};
  double d2[3] = {0, 0, 0};
  double d3[4] = {0, 0, 0, 0};
  double d4[5] = {0, 0, 0, 0, 0};

  Sym2 hessian() const { return {d2[0], d2[1], d2[2]}; }
  Vec2 gradient() const { return {d1[0], d1[1]}; }
  // Component by index list; e.g. third(0, 1, 1) = u_{x1 x2 x2}.
  double third(int a, int b, int c) const { return d3[a + b + c]; }
  double fourth(int a, int b, int c, int d) const { return d4[a + b + c + d]; }

  Jet& operator+=(const Jet& o) {
    d0 += o.d0;
    for (int k = 0; k < 2; ++k) d1[k] += o.d1[k];
    for (int k = 0; k < 3; ++k) d2[k] += o.d2[k];
    for (int k = 0; k < 4; ++k) d3[k] += o.d3[k];
    for (int k = 0; k < 5; ++k) d4[k] += o.d4[k];
    return *this;
  }
  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  Jet& operator*=(double s) {
    d0 *= s;
    for (auto& x : d1) x *= s;
    for (auto& x : d2) x *= s;
    for (auto& x : d3) x *= s;
    for (auto& x : d4) x *= s;
    return *this;
  }
};

}  // namespace abreuflow
