#include <cmath>
#include <random>

#include "abreuflow/error.hpp"
#include "abreuflow/field.hpp"
#include "abreuflow/interpolate.hpp"
#include "abreuflow/stencil.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace abreuflow;
using namespace testing;

TEST_CASE("Guillemin potential closed forms on the square") {
  const DelzantPolygon sq = make_polygon(square_edges());
  const Jet j = guillemin_eval(sq, {0.5, 0.5}, 2);
  CHECK(j.d0 == doctest::Approx(std::log(0.5)).epsilon(1e-14));
  CHECK(j.d2[0] == doctest::Approx(2.0));
  CHECK(j.d2[1] == doctest::Approx(0.0));
  CHECK(j.d2[2] == doctest::Approx(2.0));
  CHECK_THROWS_AS(guillemin_eval(sq, {1.0, 0.5}, 2), Error);
  CHECK_THROWS_AS(guillemin_eval(sq, {1.5, 0.5}, 2), Error);
}

TEST_CASE("Guillemin Hessian is positive definite at interior points") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const DelzantPolygon si = make_polygon(simplex_edges());
  int tested = 0;
  while (tested < 500) {
    const Vec2 x{u(rng), u(rng)};
    if (si.margin(x) <= 1e-6) continue;
    const Sym2 H = guillemin_eval(si, x, 2).hessian();
    CHECK(H.xx > 0);
    CHECK(H.det() > 0);
    ++tested;
  }
}

TEST_CASE("Guillemin higher derivatives agree with differences of lower ones") {
  const DelzantPolygon si = make_polygon(simplex_edges());
  const double e = 1e-5;
  for (Vec2 x : {Vec2{0.3, 0.2}, Vec2{0.1, 0.6}, Vec2{0.45, 0.45}}) {
    const Jet j = guillemin_eval(si, x, 4);
    const Jet px = guillemin_eval(si, x + Vec2{e, 0}, 4), mx = guillemin_eval(si, x - Vec2{e, 0}, 4);
    const Jet py = guillemin_eval(si, x + Vec2{0, e}, 4), my = guillemin_eval(si, x - Vec2{0, e}, 4);
    for (int k = 0; k < 2; ++k) CHECK(j.d1[k] == doctest::Approx(((k ? py.d0 - my.d0 : px.d0 - mx.d0)) / (2 * e)).epsilon(1e-6));
    for (int k = 0; k < 3; ++k) CHECK(j.d3[k] == doctest::Approx((px.d2[k] - mx.d2[k]) / (2 * e)).epsilon(1e-6));
    CHECK(j.d3[3] == doctest::Approx((py.d2[2] - my.d2[2]) / (2 * e)).epsilon(1e-6));
    for (int k = 0; k < 4; ++k) CHECK(j.d4[k] == doctest::Approx((px.d3[k] - mx.d3[k]) / (2 * e)).epsilon(1e-6));
    CHECK(j.d4[4] == doctest::Approx((py.d3[3] - my.d3[3]) / (2 * e)).epsilon(1e-6));
  }
}

TEST_CASE("grid masks") {
  const DelzantPolygon sq = make_polygon(square_edges());
  const Grid coarse = build_grid(sq, 0.25, 2);
  int in = 0;
  for (int idx = 0; idx < coarse.size(); ++idx) in += coarse.in_polygon(idx);
  CHECK(in == 25);
  REQUIRE(coarse.active.size() == 1);
  CHECK(norm(coarse.position(coarse.active[0]) - Vec2{0.5, 0.5}) < 1e-14);

  const double h = 1.0 / 64;
  const Grid fine = build_grid(sq, h, 3);
  for (int idx = 0; idx < fine.size(); ++idx) {
    if (!fine.in_polygon(idx)) continue;
    if (fine.margin[idx] >= 3 * h + 1e-9) CHECK(fine.is_active(idx));
    if (fine.margin[idx] < 3 * h - 1e-9) CHECK_FALSE(fine.is_active(idx));
  }
  double area = 0.0;
  for (int idx = 0; idx < fine.size(); ++idx)
    if (fine.in_polygon(idx)) area += fine.cell_area[idx];
  CHECK(area == doctest::Approx(1.0).epsilon(1e-12));

  const DelzantPolygon si = make_polygon(simplex_edges());
  const Grid g = build_grid(si, 1.0 / 32, 3);
  for (int idx : g.active) CHECK((1.0 - g.position(idx).x - g.position(idx).y) / std::sqrt(2.0) >= 2.0 / 32);

  CHECK_THROWS_AS(build_grid(sq, 0.75, 3), Error);
  CHECK_THROWS_AS(build_grid(sq, 0.1, 1), Error);
}

TEST_CASE("finite-difference weights") {
  const auto w = fd_weights(0.0, {-2, -1, 0, 1, 2}, 4);
  const double expect[5] = {1, -4, 6, -4, 1};
  for (int k = 0; k < 5; ++k) CHECK(w[k] == doctest::Approx(expect[k]));
  const Stencil1D& c3 = centered_stencil(3);
  double moment = 0.0;
  for (std::size_t k = 0; k < c3.offsets.size(); ++k) moment += c3.weights[k] * std::pow(c3.offsets[k], 3);
  CHECK(moment == doctest::Approx(6.0));
  Stencil1D s;
  REQUIRE(shifted_stencil(2, 0, 3, s));
  for (int p = 0; p <= 3; ++p) {
    double sum = 0.0;
    for (std::size_t k = 0; k < s.offsets.size(); ++k) sum += s.weights[k] * std::pow(s.offsets[k], p);
    CHECK(sum == doctest::Approx(p == 2 ? 2.0 : 0.0));
  }
  CHECK_FALSE(shifted_stencil(2, 0, 1, s));
}

TEST_CASE("derivatives of the unperturbed square at the center") {
  const PotentialField f = sampled_field(square_edges(), 1.0 / 64, Reference::kGuillemin);
  const Jet j = derivatives_at(f, nearest_node(*f.grid, {0.5, 0.5}), 4);
  CHECK(std::abs(j.d2[0] - 2.0) <= 1e-12);
  CHECK(std::abs(j.d2[1]) <= 1e-12);
  CHECK(std::abs(j.d2[2] - 2.0) <= 1e-12);
}

TEST_CASE("stencils are exact on quadratics, at active and collar nodes") {
  const PotentialField f = quadratic_field(square_edges(), 1.0 / 32, 3.0, 2.0, 0.5);
  const Grid& g = *f.grid;
  int collar = 0;
  for (int idx = 0; idx < g.size(); ++idx) {
    if (!g.in_polygon(idx)) continue;
    Jet j;
    try {
      j = v_derivatives_at(f, idx, 2);
    } catch (const Error&) {
      continue;
    }
    collar += !g.is_active(idx);
    CHECK(std::abs(j.d2[0] - 3.0) < 1e-8);
    CHECK(std::abs(j.d2[1] - 0.5) < 1e-8);
    CHECK(std::abs(j.d2[2] - 2.0) < 1e-8);
  }
  CHECK(collar > 0);
  CHECK_THROWS_AS(v_derivatives_at(f, g.index(0, 0), 4), Error);
}

TEST_CASE("second derivatives converge at second order") {
  auto max_error = [](double h) {
    const PotentialField f =
        sampled_field(square_edges(), h, Reference::kNone, [](Vec2 x) { return std::sin(kPi * x.x) * std::sin(kPi * x.y); });
    double err = 0.0;
    for (int idx : f.grid->active) {
      const Jet j = v_derivatives_at(f, idx, 4);
      const Jet e = sine_jet(f.grid->position(idx), 1.0, 1.0, 1.0);
      for (int k = 0; k < 3; ++k) err = std::max(err, std::abs(j.d2[k] - e.d2[k]));
    }
    return err;
  };
  const double e1 = max_error(1.0 / 32), e2 = max_error(1.0 / 64);
  CHECK(std::log2(e1 / e2) >= 1.9);
  CHECK(e2 <= 1.05 * kPi * kPi * kPi * kPi / 3.0 / (64.0 * 64.0));
}

TEST_CASE("inverse and cofactor of 2x2 Hessians") {
  auto check = [](Sym2 H, Sym2 inv, Sym2 cof, double det) {
    const InverseCofactor r = inverse_and_cofactor(H);
    CHECK(r.det == doctest::Approx(det));
    CHECK(r.inverse.xx == doctest::Approx(inv.xx));
    CHECK(r.inverse.xy == doctest::Approx(inv.xy));
    CHECK(r.inverse.yy == doctest::Approx(inv.yy));
    CHECK(r.cofactor.xx == doctest::Approx(cof.xx));
    CHECK(r.cofactor.xy == doctest::Approx(cof.xy));
    CHECK(r.cofactor.yy == doctest::Approx(cof.yy));
  };
  check({1, 0, 1}, {1, 0, 1}, {1, 0, 1}, 1);
  check({2, 0, 2}, {0.5, 0, 0.5}, {2, 0, 2}, 4);
  check({2, 1, 1}, {1, -1, 2}, {1, -1, 2}, 1);
  CHECK_THROWS_AS(inverse_and_cofactor({1, 2, 1}), MetricDegenerate);
  try {
    inverse_and_cofactor({1, 2, 1});
  } catch (const MetricDegenerate& e) {
    CHECK(e.min_eigenvalue() == doctest::Approx(-1.0));
  }
}

TEST_CASE("rescaling follows the chain rule") {
  const PotentialField f = sampled_field(square_edges(), 1.0 / 32, Reference::kGuillemin,
                                         [](Vec2 x) { return 0.01 * std::sin(2 * kPi * x.x) * std::sin(2 * kPi * x.y); });
  for (double lambda : {1.0, 4.0}) {
    const PotentialField r = rescale_potential(f, lambda, {0.5, 0.5});
    CHECK(norm(r.polygon->centroid()) < 1e-12);
    CHECK(r.polygon->area() == doctest::Approx(lambda * lambda));
    for (int idx : f.grid->active) {
      REQUIRE(r.grid->is_active(idx));
      const Sym2 a = derivatives_at(f, idx, 2).hessian();
      const Sym2 b = derivatives_at(r, idx, 2).hessian();
      CHECK(b.xx == doctest::Approx(a.xx / lambda).epsilon(1e-9));
      CHECK(b.xy == doctest::Approx(a.xy / lambda).epsilon(1e-9).scale(1.0));
      CHECK(b.yy == doctest::Approx(a.yy / lambda).epsilon(1e-9));
    }
  }
  CHECK_THROWS_AS(rescale_potential(f, -1.0, {0.5, 0.5}), Error);
  CHECK_THROWS_AS(rescale_potential(f, 2.0, {2.0, 0.5}), Error);
}

TEST_CASE("affine normalization pins the value and gradient at the centroid node") {
  PotentialField f = sampled_field(square_edges(), 1.0 / 32, Reference::kGuillemin,
                                   [](Vec2 x) { return 3.0 + 2.0 * x.x - x.y + 0.01 * std::sin(2 * kPi * x.x); });
  const int c = nearest_node(*f.grid, f.polygon->centroid());
  const Sym2 before = derivatives_at(f, c, 2).hessian();
  normalize_affine(f);
  const Jet j = v_derivatives_at(f, c, 2);
  CHECK(std::abs(f.v[c]) < 1e-14);
  CHECK(std::abs(j.d1[0]) < 1e-12);
  CHECK(std::abs(j.d1[1]) < 1e-12);
  const Sym2 after = derivatives_at(f, c, 2).hessian();
  CHECK(after.xx == doctest::Approx(before.xx));
  CHECK(after.yy == doctest::Approx(before.yy));
}

TEST_CASE("minimum active eigenvalue of the square Guillemin metric") {
  const PotentialField f = sampled_field(square_edges(), 1.0 / 32, Reference::kGuillemin);
  CHECK(min_active_eigenvalue(f) == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("interpolation reproduces quadratics and smooth fields off the grid") {
  const PotentialField q = quadratic_field(square_edges(), 1.0 / 32, 3.0, 2.0, 0.5);
  const FieldInterpolator iq(q);
  for (Vec2 x : {Vec2{0.31, 0.47}, Vec2{0.5, 0.5}, Vec2{0.9, 0.13}, Vec2{0.02, 0.5}}) {
    const Sym2 H = iq.hessian(x);
    CHECK(H.xx == doctest::Approx(3.0).epsilon(1e-8));
    CHECK(H.xy == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(H.yy == doctest::Approx(2.0).epsilon(1e-8));
    const Vec2 g = iq.gradient(x);
    CHECK(g.x == doctest::Approx(3.0 * x.x + 0.5 * x.y).epsilon(1e-8));
    CHECK(g.y == doctest::Approx(2.0 * x.y + 0.5 * x.x).epsilon(1e-8));
  }
  const PotentialField s = sampled_field(square_edges(), 1.0 / 64, Reference::kGuillemin,
                                         [](Vec2 x) { return 0.01 * std::sin(kPi * x.x) * std::sin(kPi * x.y); });
  const FieldInterpolator is(s);
  const DelzantPolygon& p = *s.polygon;
  for (Vec2 x : {Vec2{0.31, 0.47}, Vec2{0.77, 0.21}}) {
    const Sym2 H = is.hessian(x);
    const Jet e = sine_jet(x, 0.01, 1.0, 1.0) + guillemin_eval(p, x, 2);
    CHECK(H.xx == doctest::Approx(e.d2[0]).epsilon(1e-4));
    CHECK(H.yy == doctest::Approx(e.d2[2]).epsilon(1e-4));
  }
}
