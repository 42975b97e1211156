#pragma once

#include <cstdint>
#include <vector>

#include "abreuflow/linalg.hpp"
#include "abreuflow/polytope.hpp"

namespace abreuflow {

enum class NodeClass : std::uint8_t { kOutside, kCollar, kActive };

struct Grid {
  Vec2 origin;
  double h = 0.0;
  int nx = 0;
  int ny = 0;
  int collar_width = 3;
  std::vector<NodeClass> mask;
  std::vector<double> margin;     // Euclidean margin of each node
  std::vector<double> cell_area;  // area of dual cell intersected with P (in-polygon nodes)
  std::vector<int> active;        // active node indices, increasing

  int size() const { return nx * ny; }
  int index(int i, int j) const { return j * nx + i; }
  int col(int idx) const { return idx % nx; }
  int row(int idx) const { return idx / nx; }
  Vec2 position(int idx) const { return {origin.x + col(idx) * h, origin.y + row(idx) * h}; }
  Vec2 position(int i, int j) const { return {origin.x + i * h, origin.y + j * h}; }
  bool valid(int i, int j) const { return i >= 0 && j >= 0 && i < nx && j < ny; }
  bool in_polygon(int i, int j) const { return valid(i, j) && mask[index(i, j)] != NodeClass::kOutside; }
  bool is_active(int i, int j) const { return valid(i, j) && mask[index(i, j)] == NodeClass::kActive; }
  bool is_active(int idx) const { return mask[idx] == NodeClass::kActive; }
  bool in_polygon(int idx) const { return mask[idx] != NodeClass::kOutside; }
};

// Bounding-box aligned grid; throws "grid too coarse" when h exceeds the inradius.
Grid build_grid(const DelzantPolygon& polygon, double h, int collar_width);
// Grid with prescribed geometry (snapshots, rescaling).
Grid make_grid(const DelzantPolygon& polygon, Vec2 origin, double h, int nx, int ny, int collar_width);

// Area of [c - h/2, c + h/2]^2 intersected with the half-planes l_k >= shift_k.
double clipped_cell_area(const DelzantPolygon& polygon, Vec2 center, double h, double epsilon);

}  // namespace abreuflow
