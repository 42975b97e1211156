#include "abreuflow/oracle.hpp"

#include <cmath>
#include <random>

#include "abreuflow/error.hpp"
#include "abreuflow/flow.hpp"
#include "abreuflow/geodesic.hpp"
#include "abreuflow/geometry.hpp"
#include "abreuflow/interpolate.hpp"
#include "abreuflow/monitor.hpp"
#include "abreuflow/segment.hpp"
#include "json.hpp"

namespace abreuflow {

namespace {

constexpr double kPi = 3.14159265358979323846;

double uniform(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

}  // namespace

Jet PlaneWaveProduct::jet(Vec2 x) const {
  const double a = dot(k1, x) + phi1, b = dot(k2, x) + phi2;
  Jet j;
  // d^m/dx_{i1..im}: sum over subsets S of the indices hitting the first factor
  auto component = [&](int m, int ny) {
    int idx[4];
    for (int q = 0; q < m; ++q) idx[q] = q < m - ny ? 0 : 1;
    double s = 0.0;
    for (int mask = 0; mask < (1 << m); ++mask) {
      double c = 1.0;
      int na = 0;
      for (int q = 0; q < m; ++q) {
        if (mask & (1 << q)) {
          c *= k1[idx[q]];
          ++na;
        } else {
          c *= k2[idx[q]];
        }
      }
      s += c * std::sin(a + na * 0.5 * kPi) * std::sin(b + (m - na) * 0.5 * kPi);
    }
    return amplitude * s;
  };
  j.d0 = component(0, 0);
  for (int k = 0; k < 2; ++k) j.d1[k] = component(1, k);
  for (int k = 0; k < 3; ++k) j.d2[k] = component(2, k);
  for (int k = 0; k < 4; ++k) j.d3[k] = component(3, k);
  for (int k = 0; k < 5; ++k) j.d4[k] = component(4, k);
  return j;
}

PlaneWaveProduct PlaneWaveProduct::transformed(const int S[2][2], Vec2 b) const {
  const double det = double(S[0][0]) * S[1][1] - double(S[0][1]) * S[1][0];
  // S^{-T} k
  auto inv_t = [&](Vec2 k) {
    return Vec2{(S[1][1] * k.x - S[1][0] * k.y) / det, (-S[0][1] * k.x + S[0][0] * k.y) / det};
  };
  PlaneWaveProduct p = *this;
  p.k1 = inv_t(k1);
  p.k2 = inv_t(k2);
  p.phi1 = phi1 - dot(p.k1, b);
  p.phi2 = phi2 - dot(p.k2, b);
  return p;
}

std::vector<Edge> transform_edges(const std::vector<Edge>& edges, const int S[2][2], Vec2 b) {
  const int det = S[0][0] * S[1][1] - S[0][1] * S[1][0];
  if (std::abs(det) != 1) throw Error(Errc::kInvalidScale, "transform is not unimodular");
  std::vector<Edge> out;
  for (const auto& e : edges) {
    Edge t;
    t.nx = (S[1][1] * e.nx - S[1][0] * e.ny) / det;
    t.ny = (-S[0][1] * e.nx + S[0][0] * e.ny) / det;
    t.c = e.c + b.x * t.nx + b.y * t.ny;
    out.push_back(t);
  }
  return out;
}

PotentialField build_initial_field(const RunConfig& c) {
  auto poly = std::make_shared<const DelzantPolygon>(make_polygon(read_polygon_file(c.polygon)));
  validate_config(c, *poly);
  auto grid = std::make_shared<const Grid>(build_grid(*poly, c.h, c.collar_width));
  PotentialField f = make_field(poly, grid, c.reference);
  apply_perturbation(f, c.perturbation, c.amplitude, c.seed);
  normalize_affine(f);
  return f;
}

namespace {

OracleResult make(const std::string& name, double measured, double tol, const std::string& detail = "") {
  return {name, measured <= tol, measured, tol, detail};
}

double ray_length_to_inset(const FieldInterpolator& interp, Vec2 a, Vec2 dir, double eps) {
  const DelzantPolygon& p = *interp.field().polygon;
  double lo = 0.0, hi = 0.0;
  for (const auto& v : p.vertices) hi = std::max(hi, norm(v - a));
  if (p.margin(a) < eps) return 0.0;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (p.margin(a + mid * dir) >= eps) lo = mid; else hi = mid;
  }
  static const double xg[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
  static const double wg[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  const int panels = 64;
  const double w = lo / panels;
  double s = 0.0;
  for (int k = 0; k < panels; ++k)
    for (int q = 0; q < 3; ++q) {
      const Vec2 x = a + ((k + 0.5) * w + 0.5 * w * xg[q]) * dir;
      s += 0.5 * w * wg[q] * std::sqrt(interp.hessian(x).quad(dir));
    }
  return s;
}

}  // namespace

std::vector<OracleResult> run_oracle_suite(const RunConfig& c, const PotentialField& f) {
  std::vector<OracleResult> out;
  const Grid& g = *f.grid;
  const DelzantPolygon& poly = *f.polygon;

  // dual Abreu forms and the Christoffel curvature oracle
  double dual = 0.0, rm_rel = 0.0, a_max = 0.0, rm_max = 0.0;
  for (int idx : g.active) {
    const Jet u = derivatives_at(f, idx, 4);
    const double a1 = abreu_from_jet(u), a2 = abreu_cofactor_from_jet(u);
    dual = std::max(dual, std::abs(a1 - a2) / (1.0 + std::abs(a1)));
    const double r1 = rm_contraction_from_jet(u), r2 = rm_christoffel_from_jet(u);
    rm_rel = std::max(rm_rel, std::abs(r1 - r2) / std::max(r2, 1e-300) * (r2 > 1e-12 ? 1.0 : 0.0) +
                                   (r2 > 1e-12 ? 0.0 : std::abs(r1 - r2)));
    a_max = std::max(a_max, std::abs(a1));
    rm_max = std::max(rm_max, r1);
  }
  out.push_back(make("dual_abreu_forms", dual, 1e-6, "max |A - A_cofactor| / (1 + |A|) over active nodes"));
  out.push_back(make("christoffel_rm", rm_rel, 1e-4, "max relative gap, contraction vs 4-manifold Riemann tensor"));

  // boundary-measure identity
  if (f.reference == Reference::kGuillemin) {
    const AverageScalar avg = average_scalar(f);
    const double rhs = 2.0 * boundary_sigma_total(poly);
    out.push_back(make("boundary_measure", std::abs(avg.integral - rhs), 1e-2,
                       "|int_P A - 2 sum sigma|"));
  } else {
    out.push_back({"boundary_measure", true, 0.0, 0.0, "not applicable without a Guillemin reference"});
  }

  // straight-chord geodesic oracle
  const FieldInterpolator interp(f);
  const MetricGraph graph(interp, active_set(g), c.geodesic_radius);
  {
    const Vec2 a = poly.centroid();
    const double eps = c.epsilon0;
    double ray = INFINITY;
    for (int k = 0; k < 720; ++k) {
      const double th = 2 * kPi * k / 720;
      ray = std::min(ray, ray_length_to_inset(interp, a, {std::cos(th), std::sin(th)}, eps));
    }
    const double dij = geodesic_to_set(graph, a, inset_boundary_nodes(g, eps));
    out.push_back(make("straight_chord_geodesic", dij / ray - 1.0, 1e-2, "Dijkstra / best straight ray - 1"));
  }

  // scaling laws under rescaling about the centroid
  {
    const double lambda = 2.0;
    const Vec2 center = poly.centroid();
    const PotentialField r = rescale_potential(f, lambda, center);
    const double e0 = calabi_energy(f), e1 = calabi_energy(r);
    out.push_back(make("scaling_energy", std::abs(e1 - e0) / std::max(e0, 1e-300) * (e0 > 1e-12 ? 1 : 0) +
                                             (e0 > 1e-12 ? 0 : std::abs(e1 - e0)),
                       1e-3, "relative change of Calabi energy, lambda = 2"));
    double rm_err = 0.0, a_err = 0.0;
    for (int idx : g.active) {
      if (!r.grid->is_active(idx)) continue;
      const Jet u0 = derivatives_at(f, idx, 4), u1 = derivatives_at(r, idx, 4);
      const double rm0 = rm_contraction_from_jet(u0), rm1 = rm_contraction_from_jet(u1);
      rm_err = std::max(rm_err, std::abs(lambda * rm1 - rm0) / std::max(1.0, rm0));
      const double a0 = abreu_from_jet(u0), a1 = abreu_from_jet(u1);
      a_err = std::max(a_err, std::abs(lambda * a1 - a0) / std::max(1.0, std::abs(a0)));
    }
    out.push_back(make("scaling_rm", rm_err, 1e-3, "max |lambda |Rm~| - |Rm|| / max(1, |Rm|)"));
    out.push_back(make("scaling_abreu", a_err, 1e-3, "max |lambda A~ - A| / max(1, |A|)"));
    MConditionOptions mo{c.m_radius, c.m_directions, c.anchor_stride};
    MConditionOptions mr = mo;
    mr.R = lambda * mo.R;
    try {
      const FieldInterpolator ri(r);
      const double m0 = m_condition_estimate(interp, mo).value;
      const double m1 = m_condition_estimate(ri, mr).value;
      out.push_back(make("scaling_m_condition", std::abs(m1 - m0) / std::max(1.0, m0), 1e-3,
                         "relative change of the M-condition estimate"));
    } catch (const Error& e) {
      out.push_back({"scaling_m_condition", false, INFINITY, 1e-3, e.what()});
    }
  }

  // unimodular affine invariance of pointwise quantities
  {
    std::mt19937_64 rng(c.seed + 17);
    const double inr = poly.inradius();
    const Vec2 lo = poly.vertices[0];
    PlaneWaveProduct w;
    w.amplitude = c.amplitude;
    w.k1 = {2 * kPi, 0.5};
    w.k2 = {-0.7, 2 * kPi};
    w.phi1 = 0.3;
    w.phi2 = 1.1;
    double worst = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
      int S[2][2] = {{1, 0}, {0, 1}};
      for (int step = 0; step < 3; ++step) {
        const int a = int(uniform(rng) * 3) - 1;
        int E[2][2] = {{1, 0}, {0, 1}};
        if (uniform(rng) < 0.5) E[0][1] = a; else E[1][0] = a;
        int T[2][2];
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) T[i][j] = E[i][0] * S[0][j] + E[i][1] * S[1][j];
        std::copy(&T[0][0], &T[0][0] + 4, &S[0][0]);
      }
      if (uniform(rng) < 0.5) {
        std::swap(S[0][0], S[1][0]);
        std::swap(S[0][1], S[1][1]);
      }
      const Vec2 b{uniform(rng) - 0.5, uniform(rng) - 0.5};
      const DelzantPolygon tp = make_polygon(transform_edges(poly.edges, S, b));
      const PlaneWaveProduct tw = w.transformed(S, b);
      for (int k = 0; k < 20; ++k) {
        Vec2 x;
        do {
          x = lo + Vec2{uniform(rng) * 2 - 1, uniform(rng) * 2 - 1} * (4 * inr);
        } while (poly.margin(x) < 0.2 * inr);
        const Vec2 xt{S[0][0] * x.x + S[0][1] * x.y + b.x, S[1][0] * x.x + S[1][1] * x.y + b.y};
        Jet u = w.jet(x), ut = tw.jet(xt);
        if (f.reference == Reference::kGuillemin) {
          u += guillemin_eval(poly, x, 4);
          ut += guillemin_eval(tp, xt, 4);
        } else {
          u += Jet{0, {x.x, x.y}, {1, 0, 1}};
          // 1/2 |x|^2 transported: Hessian S^{-T} S^{-1}
          const double det = double(S[0][0]) * S[1][1] - double(S[0][1]) * S[1][0];
          const double i00 = S[1][1] / det, i01 = -S[0][1] / det, i10 = -S[1][0] / det, i11 = S[0][0] / det;
          ut += Jet{0, {0, 0}, {i00 * i00 + i10 * i10, i00 * i01 + i10 * i11, i01 * i01 + i11 * i11}};
        }
        if (!(eigen(u.hessian()).min > 0) || !(eigen(ut.hessian()).min > 0)) continue;
        const double a0 = abreu_from_jet(u), a1 = abreu_from_jet(ut);
        const double r0 = rm_contraction_from_jet(u), r1 = rm_contraction_from_jet(ut);
        worst = std::max({worst, std::abs(a1 - a0) / (1 + std::abs(a0)), std::abs(r1 - r0) / (1 + r0)});
      }
    }
    out.push_back(make("affine_invariance", worst, 1e-9, "A and |Rm| under 5 random unimodular maps"));
  }
  return out;
}

std::string oracle_report_json(const std::vector<OracleResult>& results) {
  nlohmann::ordered_json j;
  bool all = true;
  j["oracles"] = nlohmann::ordered_json::array();
  for (const auto& r : results) {
    nlohmann::ordered_json o;
    o["name"] = r.name;
    o["passed"] = r.passed;
    o["measured"] = std::isfinite(r.measured) ? nlohmann::ordered_json(r.measured) : nlohmann::ordered_json(nullptr);
    o["tolerance"] = r.tolerance;
    o["detail"] = r.detail;
    j["oracles"].push_back(o);
    all = all && r.passed;
  }
  j["all_passed"] = all;
  return j.dump(2) + "\n";
}

}  // namespace abreuflow
