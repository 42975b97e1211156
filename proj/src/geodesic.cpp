#include "abreuflow/geodesic.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

#include "abreuflow/error.hpp"

namespace abreuflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double speed(const FieldInterpolator& interp, Vec2 x, Vec2 xi) {
  return std::sqrt(std::max(0.0, interp.hessian(x).quad(xi)));
}

}  // namespace

double segment_length(const FieldInterpolator& interp, Vec2 a, Vec2 b) {
  static const double nodes[3] = {0.5 - 0.5 * std::sqrt(0.6), 0.5, 0.5 + 0.5 * std::sqrt(0.6)};
  static const double weights[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
  // evaluate from the lexicographically smaller end so the result is symmetric
  if (b.x < a.x || (b.x == a.x && b.y < a.y)) std::swap(a, b);
  const Vec2 xi = b - a;
  double s = 0.0;
  for (int k = 0; k < 3; ++k) s += weights[k] * speed(interp, a + nodes[k] * xi, xi);
  return s;
}

std::vector<unsigned char> active_set(const Grid& g) {
  std::vector<unsigned char> s(g.size(), 0);
  for (int idx : g.active) s[idx] = 1;
  return s;
}

MetricGraph::MetricGraph(const FieldInterpolator& interp, std::vector<unsigned char> usable, int radius)
    : interp_(&interp), usable_(std::move(usable)) {
  if (radius < 1 || radius > 2) throw Error(Errc::kConfigParse, "geodesic radius must be 1 or 2");
  for (int dj = -radius; dj <= radius; ++dj)
    for (int di = -radius; di <= radius; ++di)
      if ((di != 0 || dj != 0) && std::gcd(std::abs(di), std::abs(dj)) == 1) offsets_.push_back({di, dj});
  const Grid& g = grid();
  const int no = int(offsets_.size());
  weight_.assign(std::size_t(g.size()) * no, kInf);
  for (int idx = 0; idx < g.size(); ++idx) {
    if (!usable_[idx]) continue;
    const int i = g.col(idx), j = g.row(idx);
    for (int o = 0; o < no; ++o) {
      const int ii = i + offsets_[o].first, jj = j + offsets_[o].second;
      if (!g.valid(ii, jj)) continue;
      const int nb = g.index(ii, jj);
      if (!usable_[nb]) continue;
      if (nb < idx) {
        // reuse the reverse edge so both directions carry identical weights
        for (int r = 0; r < no; ++r)
          if (offsets_[r].first == -offsets_[o].first && offsets_[r].second == -offsets_[o].second) {
            weight_[std::size_t(idx) * no + o] = weight_[std::size_t(nb) * no + r];
            break;
          }
        continue;
      }
      weight_[std::size_t(idx) * no + o] = segment_length(interp, g.position(idx), g.position(nb));
    }
  }
}

std::vector<double> MetricGraph::distances(const std::vector<std::pair<int, double>>& sources,
                                           std::vector<int>* predecessor) const {
  const Grid& g = grid();
  const int no = int(offsets_.size());
  std::vector<double> dist(g.size(), kInf);
  if (predecessor) predecessor->assign(g.size(), -1);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  for (const auto& [node, d0] : sources) {
    if (!usable_[node]) continue;
    if (d0 < dist[node]) {
      dist[node] = d0;
      heap.push({d0, node});
    }
  }
  while (!heap.empty()) {
    const auto [d, idx] = heap.top();
    heap.pop();
    if (d > dist[idx]) continue;
    const int i = g.col(idx), j = g.row(idx);
    for (int o = 0; o < no; ++o) {
      const double w = weight_[std::size_t(idx) * no + o];
      if (w == kInf) continue;
      const int nb = g.index(i + offsets_[o].first, j + offsets_[o].second);
      const double nd = d + w;
      if (nd < dist[nb]) {
        dist[nb] = nd;
        if (predecessor) (*predecessor)[nb] = idx;
        heap.push({nd, nb});
      }
    }
  }
  return dist;
}

std::vector<std::pair<int, double>> MetricGraph::attach(Vec2 x) const {
  const Grid& g = grid();
  const int ci = int(std::floor((x.x - g.origin.x) / g.h + 0.5));
  const int cj = int(std::floor((x.y - g.origin.y) / g.h + 0.5));
  std::vector<std::pair<int, double>> out;
  for (int dj = -2; dj <= 2; ++dj)
    for (int di = -2; di <= 2; ++di) {
      const int i = ci + di, j = cj + dj;
      if (!g.valid(i, j) || !usable_[g.index(i, j)]) continue;
      out.push_back({g.index(i, j), segment_length(*interp_, x, g.position(i, j))});
    }
  return out;
}

namespace {

bool inside_usable(const MetricGraph& graph, Vec2 x) {
  const Grid& g = graph.grid();
  const double fx = (x.x - g.origin.x) / g.h, fy = (x.y - g.origin.y) / g.h;
  const int i0 = int(std::floor(fx)), j0 = int(std::floor(fy));
  for (int b = 0; b <= 1; ++b)
    for (int a = 0; a <= 1; ++a)
      if (!g.valid(i0 + a, j0 + b) || !graph.usable(g.index(i0 + a, j0 + b))) return false;
  return true;
}

double polyline_length(const FieldInterpolator& interp, const std::vector<Vec2>& p) {
  double s = 0.0;
  for (std::size_t k = 1; k < p.size(); ++k) s += segment_length(interp, p[k - 1], p[k]);
  return s;
}

}  // namespace

GeodesicResult geodesic_distance(const MetricGraph& graph, Vec2 a, Vec2 b, bool straighten) {
  const auto src = graph.attach(a);
  const auto dst = graph.attach(b);
  if (src.empty() || dst.empty()) throw Error(Errc::kUnreachable, "unreachable: endpoint away from the active region");
  std::vector<int> pred;
  const auto dist = graph.distances(src, &pred);
  double best = kInf;
  int end = -1;
  for (const auto& [node, w] : dst) {
    if (dist[node] + w < best) {
      best = dist[node] + w;
      end = node;
    }
  }
  if (end < 0 || best == kInf) throw Error(Errc::kUnreachable, "unreachable: active graph is disconnected");
  GeodesicResult r;
  r.dijkstra = best;
  std::vector<Vec2> rev = {b};
  for (int n = end; n >= 0; n = pred[n]) rev.push_back(graph.grid().position(n));
  rev.push_back(a);
  r.path.assign(rev.rbegin(), rev.rend());
  const FieldInterpolator& interp = graph.interpolator();
  r.length = polyline_length(interp, r.path);
  if (straighten) {
    double current = r.length;
    for (int pass = 0; pass < 200; ++pass) {
      for (std::size_t k = 1; k + 1 < r.path.size(); ++k) {
        const Vec2 prev = r.path[k - 1], next = r.path[k + 1], cur = r.path[k];
        const double old_len = segment_length(interp, prev, cur) + segment_length(interp, cur, next);
        const Vec2 target = 0.5 * (prev + next);
        for (double alpha = 1.0; alpha >= 0.125; alpha *= 0.5) {
          const Vec2 trial = cur + alpha * (target - cur);
          if (!inside_usable(graph, trial)) continue;
          const double len = segment_length(interp, prev, trial) + segment_length(interp, trial, next);
          if (len < old_len) {
            r.path[k] = trial;
            break;
          }
        }
      }
      const double len = polyline_length(interp, r.path);
      const bool converged = len > current - 1e-9 * current;
      current = std::min(current, len);
      if (converged) break;
    }
    r.length = current;
  }
  return r;
}

double geodesic_to_set(const MetricGraph& graph, Vec2 a, const std::vector<unsigned char>& targets) {
  const auto src = graph.attach(a);
  if (src.empty()) throw Error(Errc::kUnreachable, "unreachable: point away from the active region");
  const auto dist = graph.distances(src);
  double best = kInf;
  for (std::size_t n = 0; n < dist.size(); ++n)
    if (targets[n]) best = std::min(best, dist[n]);
  if (best == kInf) throw Error(Errc::kUnreachable, "unreachable: target set not connected");
  return best;
}

std::vector<unsigned char> inset_nodes(const Grid& g, double epsilon) {
  std::vector<unsigned char> s(g.size(), 0);
  const double tol = 1e-9 * g.h;
  for (int idx = 0; idx < g.size(); ++idx) s[idx] = g.in_polygon(idx) && g.margin[idx] >= epsilon - tol;
  return s;
}

std::vector<unsigned char> inset_boundary_nodes(const Grid& g, double epsilon) {
  const auto in = inset_nodes(g, epsilon);
  std::vector<unsigned char> s(g.size(), 0);
  for (int idx = 0; idx < g.size(); ++idx) {
    if (!in[idx]) continue;
    const int i = g.col(idx), j = g.row(idx);
    const int nb[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    for (const auto& d : nb) {
      const int ii = i + d[0], jj = j + d[1];
      if (!g.valid(ii, jj) || !in[g.index(ii, jj)]) {
        s[idx] = 1;
        break;
      }
    }
  }
  return s;
}

std::vector<double> distance_to_inset_boundary(const MetricGraph& graph, double epsilon) {
  const Grid& g = graph.grid();
  const DelzantPolygon& p = *graph.interpolator().field().polygon;
  const auto boundary = inset_boundary_nodes(g, epsilon);
  std::vector<std::pair<int, double>> sources;
  for (int idx = 0; idx < g.size(); ++idx) {
    if (!boundary[idx] || !graph.usable(idx)) continue;
    // metric distance from the node to the nearest inset edge line, frozen metric
    const Vec2 x = g.position(idx);
    double m = INFINITY;
    Vec2 n;
    for (const auto& e : p.edges) {
      const double d = e.eval(x) / e.normal_length();
      if (d < m) {
        m = d;
        n = (1.0 / e.normal_length()) * e.normal();
      }
    }
    const double gap = std::max(0.0, m - epsilon);
    const Sym2 w = graph.interpolator().hessian(x).inverse();
    sources.push_back({idx, gap / std::sqrt(w.quad(n))});
  }
  if (sources.empty()) throw Error(Errc::kEpsilonTooLarge, "epsilon too large: no inset boundary nodes in the active region");
  return graph.distances(sources);
}

}  // namespace abreuflow
