#include "abreuflow/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "abreuflow/error.hpp"

namespace abreuflow {

namespace {

constexpr double kPi = 3.14159265358979323846;

double normal_angle(const Edge& e) {
  double a = std::atan2(double(e.ny), double(e.nx));
  if (a < 0) a += 2 * kPi;
  return a;
}

Vec2 intersect(const Edge& a, const Edge& b) {
  const double d = double(a.nx) * b.ny - double(a.ny) * b.nx;
  return {(a.c * b.ny - a.ny * b.c) / d, (a.nx * b.c - a.c * b.nx) / d};
}

double scale_of(const std::vector<Vec2>& pts) {
  double s = 1.0;
  for (const auto& p : pts) s = std::max({s, std::abs(p.x), std::abs(p.y)});
  return s;
}

}  // namespace

double polygon_area(const std::vector<Vec2>& poly) {
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) a += cross(poly[i], poly[(i + 1) % poly.size()]);
  return 0.5 * a;
}

Vec2 polygon_centroid(const std::vector<Vec2>& poly) {
  double a = 0.0, cx = 0.0, cy = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2 p = poly[i], q = poly[(i + 1) % poly.size()];
    const double w = cross(p, q);
    a += w;
    cx += (p.x + q.x) * w;
    cy += (p.y + q.y) * w;
  }
  return {cx / (3 * a), cy / (3 * a)};
}

std::vector<Vec2> clip_half_plane(const std::vector<Vec2>& poly, Vec2 n, double c) {
  std::vector<Vec2> out;
  const std::size_t m = poly.size();
  out.reserve(m + 1);
  for (std::size_t i = 0; i < m; ++i) {
    const Vec2 p = poly[i], q = poly[(i + 1) % m];
    const double fp = dot(p, n) - c, fq = dot(q, n) - c;
    if (fp >= 0) out.push_back(p);
    if ((fp >= 0) != (fq >= 0)) {
      const double t = fp / (fp - fq);
      out.push_back(p + t * (q - p));
    }
  }
  return out;
}

double DelzantPolygon::area() const { return polygon_area(vertices); }

Vec2 DelzantPolygon::centroid() const { return polygon_centroid(vertices); }

double DelzantPolygon::margin(Vec2 x) const {
  double m = INFINITY;
  for (const auto& e : edges) m = std::min(m, e.eval(x) / e.normal_length());
  return m;
}

double DelzantPolygon::inradius() const {
  // Chebyshev center: an optimal vertex of max r s.t. l_k(x) >= r |nu_k| has three active constraints.
  const std::size_t n = edges.size();
  double best = 0.0;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      for (std::size_t c = b + 1; c < n; ++c) {
        const Edge* e[3] = {&edges[a], &edges[b], &edges[c]};
        double m[3][4];
        for (int r = 0; r < 3; ++r) {
          const double len = e[r]->normal_length();
          m[r][0] = e[r]->nx / len;
          m[r][1] = e[r]->ny / len;
          m[r][2] = -1.0;
          m[r][3] = e[r]->c / len;
        }
        auto det3 = [&](int col) {
          double t[3][3];
          for (int r = 0; r < 3; ++r)
            for (int k = 0; k < 3; ++k) t[r][k] = k == col ? m[r][3] : m[r][k];
          return t[0][0] * (t[1][1] * t[2][2] - t[1][2] * t[2][1]) - t[0][1] * (t[1][0] * t[2][2] - t[1][2] * t[2][0]) +
                 t[0][2] * (t[1][0] * t[2][1] - t[1][1] * t[2][0]);
        };
        const double d = det3(-1);
        if (std::abs(d) < 1e-12) continue;
        const Vec2 x{det3(0) / d, det3(1) / d};
        const double r = det3(2) / d;
        if (r > best && margin(x) >= r - 1e-12 * (1.0 + r)) best = r;
      }
  return best;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string DelzantPolygon::hash() const {
  std::string text;
  char buf[96];
  for (const auto& e : edges) {
    std::snprintf(buf, sizeof buf, "%d %d %.17g\n", e.nx, e.ny, e.c);
    text += buf;
  }
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(text)));
  return buf;
}

ValidationReport validate_delzant(const std::vector<Edge>& edges) {
  ValidationReport report;
  if (edges.size() < 3) throw Error(Errc::kDegeneratePolygon, "degenerate polygon: fewer than 3 edges");
  for (const auto& e : edges)
    if (e.nx == 0 && e.ny == 0) throw Error(Errc::kDegeneratePolygon, "degenerate polygon: zero normal");

  const int n = int(edges.size());
  for (int k = 0; k < n; ++k) {
    const int g = std::gcd(std::abs(edges[k].nx), std::abs(edges[k].ny));
    if (g != 1) {
      report.violations.push_back("edge " + std::to_string(k) + ": non-primitive normal (" +
                                  std::to_string(edges[k].nx) + "," + std::to_string(edges[k].ny) +
                                  "), gcd " + std::to_string(g));
    }
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return normal_angle(edges[a]) < normal_angle(edges[b]); });

  bool geometric_ok = true;
  for (int i = 0; i < n; ++i) {
    const Edge& a = edges[order[i]];
    const Edge& b = edges[order[(i + 1) % n]];
    double gap = normal_angle(b) - normal_angle(a);
    if (i == n - 1) gap += 2 * kPi;
    if (gap <= 0.0) {
      report.violations.push_back("non-convex: edges " + std::to_string(order[i]) + " and " +
                                  std::to_string(order[(i + 1) % n]) + " have parallel normals");
      geometric_ok = false;
    } else if (gap >= kPi - 1e-12) {
      report.violations.push_back("unbounded: normals of edges " + std::to_string(order[i]) + " and " +
                                  std::to_string(order[(i + 1) % n]) + " span an angle >= pi");
      geometric_ok = false;
    }
  }

  std::vector<Vec2> vertices;
  if (geometric_ok) {
    for (int i = 0; i < n; ++i) {
      const Edge& a = edges[order[i]];
      const Edge& b = edges[order[(i + 1) % n]];
      const long det = long(a.nx) * b.ny - long(a.ny) * b.nx;
      if (std::labs(det) != 1) {
        report.violations.push_back("vertex determinant " + std::to_string(det) + " != +-1 at edges " +
                                    std::to_string(order[i]) + "," + std::to_string(order[(i + 1) % n]));
      }
      vertices.push_back(intersect(a, b));
    }
    const double tol = 1e-12 * scale_of(vertices);
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < n; ++k) {
        if (edges[k].eval(vertices[i]) / edges[k].normal_length() < -tol) {
          report.violations.push_back("non-convex: vertex " + std::to_string(i) + " violates edge " +
                                      std::to_string(k) + " (redundant or inconsistent edge)");
          geometric_ok = false;
          break;
        }
      }
    }
    if (geometric_ok) {
      for (int i = 0; i < n; ++i) {
        if (norm(vertices[(i + 1) % n] - vertices[i]) <= tol) {
          report.violations.push_back("non-convex: edge " + std::to_string(order[(i + 1) % n]) +
                                      " has zero length");
          geometric_ok = false;
        }
      }
      if (geometric_ok && polygon_area(vertices) <= tol * tol) {
        report.violations.push_back("degenerate: polygon has zero area");
        geometric_ok = false;
      }
    }
  }

  if (report.violations.empty()) {
    DelzantPolygon p;
    p.edges = edges;
    p.ccw_order = order;
    p.vertices = vertices;
    report.polygon = std::move(p);
  }
  return report;
}

DelzantPolygon make_polygon(const std::vector<Edge>& edges) {
  auto report = validate_delzant(edges);
  if (!report.valid()) {
    std::string msg = "invalid Delzant polygon:";
    for (const auto& v : report.violations) msg += " " + v + ";";
    throw Error(Errc::kDegeneratePolygon, msg);
  }
  return *report.polygon;
}

std::vector<Edge> parse_polygon_text(const std::string& text) {
  std::vector<Edge> edges;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hashpos = line.find('#');
    if (hashpos != std::string::npos) line.erase(hashpos);
    std::istringstream ls(line);
    Edge e;
    if (!(ls >> e.nx)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw Error(Errc::kConfigParse, "polygon line " + std::to_string(lineno) + ": expected 'nu_x nu_y c'");
    }
    std::string rest;
    if (!(ls >> e.ny >> e.c) || (ls >> rest))
      throw Error(Errc::kConfigParse, "polygon line " + std::to_string(lineno) + ": expected 'nu_x nu_y c'");
    edges.push_back(e);
  }
  return edges;
}

std::vector<Edge> read_polygon_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(Errc::kIo, "cannot read polygon file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_polygon_text(ss.str());
}

double InsetRegion::margin(Vec2 x) const {
  double m = INFINITY;
  for (const auto& e : parent->edges) m = std::min(m, e.eval(x) / e.normal_length() - epsilon);
  return m;
}

double InsetRegion::area() const { return empty() ? 0.0 : polygon_area(vertices); }

InsetRegion inset(const DelzantPolygon& polygon, double epsilon) {
  if (!(epsilon >= 0.0)) throw Error(Errc::kInvalidInset, "invalid inset: negative epsilon");
  InsetRegion r;
  r.parent = &polygon;
  r.epsilon = epsilon;
  std::vector<Vec2> poly = polygon.vertices;
  for (int k : polygon.ccw_order) {
    const Edge& e = polygon.edges[k];
    poly = clip_half_plane(poly, e.normal(), e.c + epsilon * e.normal_length());
    if (poly.size() < 3) break;
  }
  // drop near-duplicate points left by clipping through a vertex
  std::vector<Vec2> clean;
  const double tol = 1e-12 * scale_of(polygon.vertices);
  for (const auto& p : poly)
    if (clean.empty() || norm(p - clean.back()) > tol) clean.push_back(p);
  while (clean.size() > 1 && norm(clean.front() - clean.back()) <= tol) clean.pop_back();
  if (clean.size() >= 3 && polygon_area(clean) > tol * tol) r.vertices = std::move(clean);
  return r;
}

double boundary_sigma_length(const DelzantPolygon& polygon, int k) {
  if (k < 0 || k >= int(polygon.edges.size())) throw std::out_of_range("edge index out of range");
  const int n = int(polygon.ccw_order.size());
  for (int i = 0; i < n; ++i) {
    if (polygon.ccw_order[i] != k) continue;
    const Vec2 a = polygon.vertices[(i + n - 1) % n];
    const Vec2 b = polygon.vertices[i];
    return norm(b - a) / polygon.edges[k].normal_length();
  }
  return 0.0;
}

double boundary_sigma_total(const DelzantPolygon& polygon) {
  double s = 0.0;
  for (int k = 0; k < int(polygon.edges.size()); ++k) s += boundary_sigma_length(polygon, k);
  return s;
}

namespace {

Classification classify_margin(double m, double scale) {
  const double tol = 1e-12 * scale;
  if (m > tol) return {PointClass::kInterior, m};
  if (m >= -tol) return {PointClass::kBoundary, m};
  return {PointClass::kExterior, m};
}

}  // namespace

Classification classify_point(const DelzantPolygon& polygon, Vec2 x) {
  return classify_margin(polygon.margin(x), scale_of(polygon.vertices));
}

Classification classify_point(const InsetRegion& region, Vec2 x) {
  if (region.empty()) return {PointClass::kExterior, region.margin(x)};
  return classify_margin(region.margin(x), scale_of(region.parent->vertices));
}

}  // namespace abreuflow
