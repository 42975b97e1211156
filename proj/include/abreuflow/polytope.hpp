#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "abreuflow/linalg.hpp"

namespace abreuflow {

// Affine edge function l(x) = <x, nu> - c, positive inside.
struct Edge {
  int nx = 0;
  int ny = 0;
  double c = 0.0;

  Vec2 normal() const { return {double(nx), double(ny)}; }
  double normal_length() const { return std::hypot(double(nx), double(ny)); }
  double eval(Vec2 x) const { return nx * x.x + ny * x.y - c; }
};

struct DelzantPolygon {
  std::vector<Edge> edges;       // input order defines edge indices
  std::vector<int> ccw_order;    // edge indices sorted by normal angle
  std::vector<Vec2> vertices;    // vertex i joins edges ccw_order[i] and ccw_order[i+1]

  double area() const;
  Vec2 centroid() const;
  double inradius() const;
  std::string hash() const;
  // Euclidean margin min_k l_k(x) / |nu_k|.
  double margin(Vec2 x) const;
};

struct ValidationReport {
  std::vector<std::string> violations;
  std::optional<DelzantPolygon> polygon;
  bool valid() const { return polygon.has_value(); }
};

ValidationReport validate_delzant(const std::vector<Edge>& edges);
// Throws Error(kDegeneratePolygon) listing the violations when invalid.
DelzantPolygon make_polygon(const std::vector<Edge>& edges);

std::vector<Edge> parse_polygon_text(const std::string& text);
std::vector<Edge> read_polygon_file(const std::string& path);

// Points at Euclidean distance >= epsilon from every edge line of the parent.
struct InsetRegion {
  const DelzantPolygon* parent = nullptr;
  double epsilon = 0.0;
  std::vector<Vec2> vertices;  // counterclockwise

  bool empty() const { return vertices.size() < 3; }
  double margin(Vec2 x) const;  // min_k (l_k(x) - eps |nu_k|) / |nu_k|
  double area() const;
};

InsetRegion inset(const DelzantPolygon& polygon, double epsilon);

double boundary_sigma_length(const DelzantPolygon& polygon, int k);
double boundary_sigma_total(const DelzantPolygon& polygon);

enum class PointClass { kInterior, kBoundary, kExterior };

struct Classification {
  PointClass kind;
  double margin;
};

Classification classify_point(const DelzantPolygon& polygon, Vec2 x);
Classification classify_point(const InsetRegion& region, Vec2 x);

// Convex polygon clipped by the half-plane <x, n> >= c.
std::vector<Vec2> clip_half_plane(const std::vector<Vec2>& poly, Vec2 n, double c);
double polygon_area(const std::vector<Vec2>& poly);
Vec2 polygon_centroid(const std::vector<Vec2>& poly);

std::uint64_t fnv1a(const std::string& s);

}  // namespace abreuflow
