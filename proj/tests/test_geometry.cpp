#include <cmath>
#include <fstream>
#include <random>

#include "abreuflow/error.hpp"
#include "abreuflow/geodesic.hpp"
#include "abreuflow/geometry.hpp"
#include "abreuflow/interpolate.hpp"
#include "abreuflow/oracle.hpp"
#include "abreuflow/segment.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace abreuflow;
using namespace testing;

namespace {

Jet square_jet(Vec2 x) { return guillemin_eval(make_polygon(square_edges()), x, 4); }

}  // namespace

TEST_CASE("flat potential has no curvature") {
  const PotentialField f = quadratic_field(square_edges(), 1.0 / 32, 2.0, 1.0, 0.25);
  for (int idx : f.grid->active) {
    CHECK(std::abs(abreu_scalar(f, idx).primary) <= 1e-10);
    CHECK(std::abs(abreu_scalar(f, idx).cofactor) <= 1e-10);
    CHECK(curvature_norm(f, idx) <= 1e-10);
    if (q_available(*f.grid, idx)) CHECK(q_quantity(f, idx).q <= 1e-10);
  }
  const AverageScalar avg = average_scalar(f);
  CHECK(std::abs(avg.active_mean) <= 1e-10);
}

TEST_CASE("scalar curvature of the square and simplex Guillemin metrics") {
  const PotentialField sq = sampled_field(square_edges(), 1.0 / 32, Reference::kGuillemin);
  for (int idx : sq.grid->active) {
    const AbreuValue a = abreu_scalar(sq, idx);
    CHECK(a.primary == doctest::Approx(8.0).epsilon(1e-9));
    CHECK(a.cofactor == doctest::Approx(8.0).epsilon(1e-9));
  }
  const PotentialField si = sampled_field(simplex_edges(), 1.0 / 32, Reference::kGuillemin);
  for (int idx : si.grid->active) CHECK(abreu_scalar(si, idx).primary == doctest::Approx(12.0).epsilon(1e-9));
  CHECK(average_scalar(si).lattice_prediction == doctest::Approx(12.0));
}

TEST_CASE("the two Abreu forms agree on analytic potentials") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.1, 0.9);
  for (int n = 0; n < 200; ++n) {
    const Vec2 x{u(rng), u(rng)};
    const Jet j = square_jet(x) + sine_jet(x, 0.02, 1 + n % 3, 2 - n % 2);
    const double a = abreu_from_jet(j), b = abreu_cofactor_from_jet(j);
    CHECK(std::abs(a - b) <= 1e-6 * (1.0 + std::abs(a)));
  }
}

TEST_CASE("curvature norm of the square Guillemin metric") {
  const Jet c = square_jet({0.5, 0.5});
  CHECK(rm_contraction_from_jet(c) == doctest::Approx(std::sqrt(32.0)).epsilon(1e-12));
  CHECK(rm_christoffel_from_jet(c) == doctest::Approx(std::sqrt(32.0)).epsilon(1e-10));
  const PotentialField f = sampled_field(square_edges(), 1.0 / 64, Reference::kGuillemin);
  CHECK(curvature_norm(f, nearest_node(*f.grid, {0.5, 0.5})) == doctest::Approx(std::sqrt(32.0)).epsilon(1e-9));
}

TEST_CASE("contraction formula agrees with the Christoffel oracle") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.15, 0.85);
  for (int n = 0; n < 100; ++n) {
    const Vec2 x{u(rng), u(rng)};
    Jet j = square_jet(x) + sine_jet(x, 0.03, 1 + n % 2, 1 + n % 3);
    j += random_quartic(rng, 0.05).jet(x);
    if (eigen(j.hessian()).min <= 0.1) continue;
    const double a = rm_contraction_from_jet(j), b = rm_christoffel_from_jet(j);
    CHECK(std::abs(a - b) <= 1e-10 * (1.0 + b));
  }
}

TEST_CASE("Christoffel symbols are torsion free and the Riemann tensor has its symmetries") {
  const Vec2 x{0.3, 0.6};
  const Jet j = square_jet(x) + sine_jet(x, 0.05, 1, 2);
  const BlockMetric m = block_metric(j);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c) CHECK(m.gamma[a][b][c] == doctest::Approx(m.gamma[a][c][b]));
  const Tensor4 R = riemann_lowered(m);
  auto at = [&](int a, int b, int c, int d) { return R[a * 64 + b * 16 + c * 4 + d]; };
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d) {
          CHECK(at(a, b, c, d) == doctest::Approx(-at(b, a, c, d)).epsilon(1e-9).scale(1.0));
          CHECK(at(a, b, c, d) == doctest::Approx(at(c, d, a, b)).epsilon(1e-9).scale(1.0));
          CHECK(std::abs(at(a, b, c, d) + at(a, c, d, b) + at(a, d, b, c)) <= 1e-9);
        }
}

TEST_CASE("Q quantity on the square") {
  const PotentialField f = sampled_field(square_edges(), 1.0 / 64, Reference::kGuillemin);
  const int c = nearest_node(*f.grid, {0.5, 0.5});
  REQUIRE(q_available(*f.grid, c));
  const QValue q = q_quantity(f, c);
  CHECK(q.rm == doctest::Approx(std::sqrt(32.0)).epsilon(1e-9));
  CHECK(q.grad_rm <= 1e-6);
  CHECK(q.q == doctest::Approx(q.rm + std::sqrt(q.hess_rm) + std::cbrt(q.grad_rm * q.grad_rm)));
  CHECK_FALSE(q_available(*f.grid, f.grid->index(0, 0)));
  CHECK_THROWS_AS(q_quantity(f, f.grid->index(0, 0)), Error);
}

TEST_CASE("curvature quantities scale under rescaling") {
  const PotentialField f = sampled_field(square_edges(), 1.0 / 32, Reference::kGuillemin,
                                         [](Vec2 x) { return 0.01 * std::sin(2 * kPi * x.x) * std::sin(2 * kPi * x.y); });
  const double lambda = 2.0;
  const PotentialField r = rescale_potential(f, lambda, {0.5, 0.5});
  for (Vec2 p : {Vec2{0.5, 0.5}, Vec2{0.3, 0.6}}) {
    const int idx = nearest_node(*f.grid, p);
    CHECK(curvature_norm(r, idx) == doctest::Approx(curvature_norm(f, idx) / lambda).epsilon(1e-6));
    CHECK(abreu_scalar(r, idx).primary == doctest::Approx(abreu_scalar(f, idx).primary / lambda).epsilon(1e-6));
    const QValue a = q_quantity(f, idx), b = q_quantity(r, idx);
    CHECK(b.q == doctest::Approx(a.q / lambda).epsilon(1e-6));
    CHECK(b.grad_rm == doctest::Approx(a.grad_rm / std::pow(lambda, 1.5)).epsilon(1e-6).scale(1e-6));
    CHECK(b.hess_rm == doctest::Approx(a.hess_rm / (lambda * lambda)).epsilon(1e-6));
  }
  CHECK(average_scalar(r).active_mean == doctest::Approx(average_scalar(f).active_mean / lambda).epsilon(1e-9));
}

TEST_CASE("whole-polygon quadrature of the scalar curvature") {
  const PotentialField f = sampled_field(square_edges(), 1.0 / 64, Reference::kGuillemin);
  const AverageScalar avg = average_scalar(f);
  CHECK(std::abs(avg.integral - 8.0) <= 1e-2);
  CHECK(avg.lattice_prediction == doctest::Approx(8.0));
  CHECK(avg.active_mean == doctest::Approx(8.0).epsilon(1e-9));
}

TEST_CASE("geometry snapshot and its CSV") {
  const PotentialField f = sampled_field(square_edges(), 1.0 / 16, Reference::kGuillemin);
  const GeometrySnapshot s = compute_snapshot(f, 0.5, 2);
  CHECK(s.nodes.size() == f.grid->active.size());
  CHECK(s.Abar == doctest::Approx(8.0));
  const GeometrySnapshot s1 = compute_snapshot(f, 0.5, 1);
  for (std::size_t k = 0; k < s.nodes.size(); ++k) CHECK(s.nodes[k].Q == s1.nodes[k].Q);
  const auto dir = scratch_dir("snapshot_csv");
  write_snapshot_csv(s, *f.grid, (dir / "g.csv").string());
  std::ifstream in(dir / "g.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "x1,x2,A,rm,grad_rm,hess_rm,Q,eig_min,eig_max,trace_inv");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == int(s.nodes.size()));
}

TEST_CASE("geodesic distances in flat and constant metrics") {
  const PotentialField flat = quadratic_field(square_edges(), 1.0 / 32);
  const FieldInterpolator fi(flat);
  const MetricGraph g(fi, active_set(*flat.grid));
  const GeodesicResult r = geodesic_distance(g, {0.2, 0.2}, {0.8, 0.2});
  CHECK(r.length == doctest::Approx(0.6).epsilon(0.01));
  CHECK(r.length <= r.dijkstra);
  CHECK(segment_length(fi, {0.2, 0.2}, {0.8, 0.2}) == doctest::Approx(0.6).epsilon(1e-12));

  const PotentialField aniso = quadratic_field(square_edges(), 1.0 / 32, 4.0, 1.0);
  const FieldInterpolator ai(aniso);
  const MetricGraph ga(ai, active_set(*aniso.grid));
  CHECK(geodesic_distance(ga, {0.2, 0.5}, {0.8, 0.5}).length == doctest::Approx(1.2).epsilon(0.01));
  CHECK(geodesic_distance(ga, {0.5, 0.2}, {0.5, 0.8}).length == doctest::Approx(0.6).epsilon(0.01));

  const MetricGraph g1(fi, active_set(*flat.grid), 1);
  CHECK(geodesic_distance(g1, {0.2, 0.2}, {0.8, 0.5}).length == doctest::Approx(std::hypot(0.6, 0.3)).epsilon(0.01));
}

TEST_CASE("graph distance to an inset boundary beats every straight ray") {
  const PotentialField f = sampled_field(square_edges(), 1.0 / 64, Reference::kGuillemin);
  const FieldInterpolator fi(f);
  const MetricGraph g(fi, active_set(*f.grid));
  const double eps = 0.25;
  double ray = INFINITY;
  for (int k = 0; k < 360; ++k) {
    const double th = 2 * kPi * k / 360;
    const Vec2 d{std::cos(th), std::sin(th)};
    const double t = 0.25 / std::max(std::abs(d.x), std::abs(d.y));
    ray = std::min(ray, segment_length(fi, {0.5, 0.5}, Vec2{0.5, 0.5} + t * d));
  }
  const double dij = geodesic_to_set(g, {0.5, 0.5}, inset_boundary_nodes(*f.grid, eps));
  CHECK(dij <= 1.01 * ray);
  // shortest ray runs along an axis: int_{1/2}^{3/4} dx / sqrt(2x(1-x)) = (pi/6) / sqrt(2)
  CHECK(ray == doctest::Approx(kPi / 6.0 / std::sqrt(2.0)).epsilon(1e-4));
  const auto dist = distance_to_inset_boundary(g, eps);
  CHECK(dist[nearest_node(*f.grid, {0.5, 0.5})] == doctest::Approx(dij).epsilon(0.02));
  CHECK_THROWS_AS(distance_to_inset_boundary(g, 0.6), Error);
}

TEST_CASE("M-condition values") {
  const PotentialField flat = quadratic_field(square_edges(), 1.0 / 32);
  const FieldInterpolator fi(flat);
  CHECK(m_condition_value(fi, {0.5, 0.5}, {1, 0}, 0.25) == doctest::Approx(0.5).epsilon(1e-12));
  const PotentialField sq = sampled_field(square_edges(), 1.0 / 32, Reference::kGuillemin);
  const FieldInterpolator si(sq);
  CHECK(m_condition_value(si, {0.5, 0.5}, {1, 0}, 0.25) == doctest::Approx(std::log(3.0)).epsilon(1e-12));

  const PotentialField p = sampled_field(square_edges(), 1.0 / 32, Reference::kGuillemin,
                                         [](Vec2 x) { return 0.01 * std::sin(2 * kPi * x.x) * std::sin(2 * kPi * x.y); });
  const FieldInterpolator pi(p);
  const MConditionEstimate a = m_condition_estimate(pi, {0.1, 8, 2});
  CHECK(a.admissible > 0);
  for (double lambda : {2.0, 5.0}) {
    const PotentialField r = rescale_potential(p, lambda, {0.5, 0.5});
    const FieldInterpolator ri(r);
    const MConditionEstimate b = m_condition_estimate(ri, {0.1 * lambda, 8, 2});
    CHECK(b.admissible == a.admissible);
    CHECK(b.value == doctest::Approx(a.value).epsilon(1e-9));
  }
  CHECK_THROWS_AS(m_condition_estimate(pi, {0.4, 8, 2}), Error);
}

TEST_CASE("segment trace integrals") {
  const PotentialField flat = quadratic_field(square_edges(), 1.0 / 32);
  const FieldInterpolator fi(flat);
  CHECK(segment_trace_integral(fi, {0.5, 0.5}, {1, 0}, 0.2) == doctest::Approx(0.8).epsilon(1e-10));
  const double eps = 0.05;
  const PotentialField thin = quadratic_field(square_edges(), 1.0 / 32, eps, 1.0);
  const FieldInterpolator ti(thin);
  CHECK(segment_trace_integral(ti, {0.5, 0.5}, {0, 1}, 0.2) >= 0.4 / eps);
  CHECK(segment_directional_integral(ti, {0.5, 0.5}, {0, 1}, {1, 0}, 0.2) == doctest::Approx(0.4 / eps).epsilon(1e-9));
  const PotentialField sq = sampled_field(square_edges(), 1.0 / 64, Reference::kGuillemin);
  const FieldInterpolator si(sq);
  const double expect = (0.5625 - 2.0 * 0.421875 / 3.0) - (0.0625 - 2.0 * 0.015625 / 3.0) + 0.25;
  CHECK(segment_trace_integral(si, {0.5, 0.5}, {1, 0}, 0.25) == doctest::Approx(expect).epsilon(1e-6));
  CHECK_THROWS_AS(segment_trace_integral(si, {0.5, 0.5}, {1, 0}, 0.6), Error);
}

TEST_CASE("Hessian bound along segments") {
  const PotentialField flat = quadratic_field(square_edges(), 1.0 / 32);
  const int c = nearest_node(*flat.grid, {0.5, 0.5});
  const HessianBoundReport a = hessian_segment_bound(sample_lattice_segment(flat, c, 1, 0, 8));
  CHECK(a.differential_ok);
  CHECK(a.rm_sq_integral <= 1e-18);
  CHECK(a.H0 == doctest::Approx(1.0));

  const PotentialField sq = sampled_field(square_edges(), 1.0 / 64, Reference::kGuillemin);
  const int cs = nearest_node(*sq.grid, {0.5, 0.5});
  const SegmentSample seg = sample_lattice_segment(sq, cs, 1, 0, 16);
  for (std::size_t k = 0; k < seg.s.size(); ++k) {
    const double x = 0.5 + seg.s[k];
    CHECK(seg.H[k] == doctest::Approx(1.0 / (2.0 * x * (1.0 - x))).epsilon(1e-9));
  }
  const HessianBoundReport b = hessian_segment_bound(seg);
  CHECK(b.differential_ok);
  CHECK(b.checked > 0);
  CHECK(b.bound_integral > 0.0);
  CHECK(b.bound_root > b.bound_integral);
  CHECK(b.H0 == doctest::Approx(2.0).epsilon(1e-9));
  CHECK_THROWS_AS(sample_lattice_segment(sq, cs, 1, 0, 40), Error);
}

TEST_CASE("coordinate inequalities") {
  const CoordinateReport flat = coordinate_inequality_from_jet(Jet{0, {0, 0}, {1, 0, 1}});
  CHECK(flat.holds);
  CHECK(flat.lhs_cross[0] == 0.0);
  CHECK(flat.lhs_diag[0] == 0.0);
  const CoordinateReport c = coordinate_inequality_from_jet(square_jet({0.5, 0.5}));
  CHECK(c.holds);
  CHECK(std::abs(c.lhs_cross[0]) <= 1e-12);
  CHECK(c.lhs_diag[0] == doctest::Approx(4.0));
  CHECK(c.rhs_diag[0] == doctest::Approx(2.0 * std::sqrt(32.0)));
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.1, 0.9);
  int checked = 0;
  while (checked < 1000) {
    const Vec2 x{u(rng), u(rng)};
    const Jet j = square_jet(x) + random_quartic(rng, 0.1).jet(x);
    if (eigen(j.hessian()).min <= 0.0) continue;
    CHECK(coordinate_inequality_from_jet(j).holds);
    ++checked;
  }
}

TEST_CASE("plane-wave products transform covariantly") {
  PlaneWaveProduct w;
  w.amplitude = 0.3;
  w.k1 = {1.3, -0.4};
  w.k2 = {0.2, 2.1};
  w.phi1 = 0.7;
  w.phi2 = -0.2;
  const int S[2][2] = {{2, 1}, {1, 1}};
  const Vec2 b{0.3, -0.1};
  const PlaneWaveProduct t = w.transformed(S, b);
  const Vec2 x{0.4, 0.9};
  const Vec2 xt{2 * x.x + x.y + b.x, x.x + x.y + b.y};
  CHECK(t.jet(xt).d0 == doctest::Approx(w.jet(x).d0));
  const double e = 1e-4;
  const Jet j = w.jet(x);
  CHECK(j.d3[1] == doctest::Approx((w.jet(x + Vec2{e, 0}).d2[1] - w.jet(x - Vec2{e, 0}).d2[1]) / (2 * e)).epsilon(1e-6));
  CHECK(j.d4[2] == doctest::Approx((w.jet(x + Vec2{0, e}).d3[1] - w.jet(x - Vec2{0, e}).d3[1]) / (2 * e)).epsilon(1e-6));
  const auto edges = transform_edges(square_edges(), S, b);
  const DelzantPolygon p = make_polygon(edges);
  CHECK(p.area() == doctest::Approx(1.0));
  for (std::size_t k = 0; k < edges.size(); ++k)
    CHECK(edges[k].eval(xt) == doctest::Approx(square_edges()[k].eval(x)));
}
