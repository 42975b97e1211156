#pragma once

#include <array>
#include <vector>

namespace abreuflow {

// Finite-difference weights for derivative `order` at z from nodes x (Fornberg's recursion).
std::vector<double> fd_weights(double z, const std::vector<double>& x, int order);

// 1-D window of integer offsets and unit-spacing weights.
struct Stencil1D {
  std::vector<int> offsets;
  std::vector<double> weights;
};

// Centered second-order stencils for derivative orders 0..4.
const Stencil1D& centered_stencil(int order);

// Second-order accurate window for `order` (1 or 2) with every offset in [lo, hi]; prefers centered.
// Returns false if no window fits.
bool shifted_stencil(int order, int lo, int hi, Stencil1D& out);

}  // namespace abreuflow
