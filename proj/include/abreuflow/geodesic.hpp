#pragma once

#include <utility>
#include <vector>

#include "abreuflow/interpolate.hpp"

namespace abreuflow {

// Length of the straight segment a->b in the metric D^2u, 3-point Gauss rule.
double segment_length(const FieldInterpolator& interp, Vec2 a, Vec2 b);

// Lattice graph over a node subset with the 8 (radius 1) or 16 (radius 2) coprime offsets.
class MetricGraph {
 public:
  MetricGraph(const FieldInterpolator& interp, std::vector<unsigned char> usable, int radius = 2);

  const Grid& grid() const { return *interp_->field().grid; }
  bool usable(int node) const { return usable_[node] != 0; }
  const FieldInterpolator& interpolator() const { return *interp_; }

  // Multi-source Dijkstra; sources carry initial distances. Unreached nodes stay +inf.
  std::vector<double> distances(const std::vector<std::pair<int, double>>& sources,
                                std::vector<int>* predecessor = nullptr) const;

  // Usable nodes within two cells of x, with the straight-segment length to x.
  std::vector<std::pair<int, double>> attach(Vec2 x) const;

 private:
  const FieldInterpolator* interp_;
  std::vector<unsigned char> usable_;
  std::vector<std::pair<int, int>> offsets_;
  std::vector<double> weight_;  // per node, per offset; inf when the edge is absent
};

std::vector<unsigned char> active_set(const Grid& g);

struct GeodesicResult {
  double dijkstra = 0.0;    // graph length including the attachment links
  double length = 0.0;      // after straightening (never larger)
  std::vector<Vec2> path;
};

// Point-to-point distance on the active region. Throws "unreachable" if disconnected.
GeodesicResult geodesic_distance(const MetricGraph& graph, Vec2 a, Vec2 b, bool straighten = true);
// Distance from a point to the nearest node flagged in `targets`.
double geodesic_to_set(const MetricGraph& graph, Vec2 a, const std::vector<unsigned char>& targets);

// Nodes of the inset P_eps (margin >= eps) that have a 4-neighbour outside it.
std::vector<unsigned char> inset_nodes(const Grid& g, double epsilon);
std::vector<unsigned char> inset_boundary_nodes(const Grid& g, double epsilon);

// Distance from every usable node to the boundary of P_eps (multi-source from its boundary nodes).
std::vector<double> distance_to_inset_boundary(const MetricGraph& graph, double epsilon);

}  // namespace abreuflow
