#include "abreuflow/segment.hpp"

#include <cmath>

#include "abreuflow/error.hpp"

namespace abreuflow {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double m_condition_value(const FieldInterpolator& interp, Vec2 p, Vec2 nu, double R) {
  const Vec2 a = interp.gradient(p - R * nu);
  const Vec2 b = interp.gradient(p + R * nu);
  return std::abs(dot(a - b, nu));
}

MConditionEstimate m_condition_estimate(const FieldInterpolator& interp, const MConditionOptions& opt) {
  const PotentialField& f = interp.field();
  const Grid& g = *f.grid;
  const DelzantPolygon& poly = *f.polygon;
  if (!(opt.R > 0) || opt.directions < 1 || opt.anchor_stride < 1)
    throw Error(Errc::kNoAdmissibleSegments, "no admissible segments: invalid M-condition options");
  MConditionEstimate est;
  est.value = -1.0;
  std::vector<Vec2> dirs;
  for (int k = 0; k < opt.directions; ++k) {
    const double th = kPi * k / opt.directions;
    dirs.push_back({std::cos(th), std::sin(th)});
  }
  for (int idx : g.active) {
    if (g.col(idx) % opt.anchor_stride != 0 || g.row(idx) % opt.anchor_stride != 0) continue;
    const Vec2 p = g.position(idx);
    for (const Vec2& nu : dirs) {
      if (poly.margin(p - 3 * opt.R * nu) <= 0.0 || poly.margin(p + 3 * opt.R * nu) <= 0.0) continue;
      const double m = m_condition_value(interp, p, nu, opt.R);
      ++est.admissible;
      if (m > est.value) {
        est.value = m;
        est.argmax_p = p;
        est.argmax_nu = nu;
      }
    }
  }
  if (est.admissible == 0) throw Error(Errc::kNoAdmissibleSegments, "no admissible segments for the M-condition");
  return est;
}

SegmentSample sample_lattice_segment(const PotentialField& f, int center_node, int step_i, int step_j, int k) {
  const Grid& g = *f.grid;
  SegmentSample seg;
  const Vec2 xi{double(step_i), double(step_j)};
  const double len = norm(xi);
  if (len == 0.0 || k < 1) throw Error(Errc::kSegmentClipped, "segment clipped: empty segment");
  seg.p = g.position(center_node);
  seg.nu = (1.0 / len) * xi;
  seg.delta = len * g.h;
  seg.R = k * seg.delta;
  const int i0 = g.col(center_node), j0 = g.row(center_node);
  for (int m = -k; m <= k; ++m) {
    const int i = i0 + m * step_i, j = j0 + m * step_j;
    if (!g.is_active(i, j)) throw Error(Errc::kSegmentClipped, "segment clipped: leaves the active region");
    const Jet u = derivatives_at(f, g.index(i, j), 4);
    const Sym2 hs = u.hessian();
    seg.s.push_back(m * seg.delta);
    seg.H.push_back(hs.quad(seg.nu));
    seg.rm.push_back(rm_contraction_from_jet(u));
    seg.inverse.push_back(inverse_and_cofactor(hs).inverse);
  }
  return seg;
}

HessianBoundReport hessian_segment_bound(const SegmentSample& seg, double M_value) {
  HessianBoundReport r;
  const int n = int(seg.s.size());
  const int mid = n / 2;
  r.H0 = seg.H[mid];
  double M = 0.0, rm2 = 0.0;
  for (int i = 0; i + 1 < n; ++i) {
    M += 0.5 * seg.delta * (seg.H[i] + seg.H[i + 1]);
    rm2 += 0.5 * seg.delta * (seg.rm[i] * seg.rm[i] + seg.rm[i + 1] * seg.rm[i + 1]);
  }
  r.M = M_value >= 0.0 ? M_value : M;
  r.rm_sq_integral = rm2;
  r.C_integral = rm2;
  r.C_root = std::sqrt(rm2);
  r.long_regime = seg.R > 1.0;
  auto bound = [&](double C) {
    if (r.long_regime) return std::exp(0.5 * (r.M - C));
    return C > 0.0 ? (std::exp(0.5 * r.M) - 1.0) / (C * seg.R) : INFINITY;
  };
  r.bound_integral = bound(r.C_integral);
  r.bound_root = bound(r.C_root);
  r.holds_integral = r.H0 <= r.bound_integral;
  r.holds_root = r.H0 <= r.bound_root;

  std::vector<double> inv(n);
  for (int i = 0; i < n; ++i) inv[i] = 1.0 / seg.H[i];
  const double d2 = seg.delta * seg.delta;
  r.worst_margin = INFINITY;
  for (int i = 1; i + 1 < n; ++i) {
    const double second = (inv[i + 1] - 2 * inv[i] + inv[i - 1]) / d2;
    double tol = 1e-9 * (1.0 + seg.rm[i] + std::abs(second));
    if (n >= 5) {
      const int c = std::min(std::max(i, 2), n - 3);
      const double fourth = (inv[c + 2] - 4 * inv[c + 1] + 6 * inv[c] - 4 * inv[c - 1] + inv[c - 2]) / (d2 * d2);
      tol += d2 * std::abs(fourth) / 12.0;
    }
    const double margin = seg.rm[i] + tol - second;
    r.worst_margin = std::min(r.worst_margin, margin);
    if (margin < 0.0) r.differential_ok = false;
    ++r.checked;
  }
  return r;
}

CoordinateReport coordinate_inequality_from_jet(const Jet& u, double tolerance) {
  const InverseHessianJet j = inverse_hessian_jet(u);
  const double rm = rm_contraction_from_jet(u);
  CoordinateReport r;
  r.margin = INFINITY;
  for (int o = 0; o < 2; ++o) {
    const int x = o, z = 1 - o;
    const Mat2& T = j.ddW[x][x];
    r.lhs_cross[o] = std::abs(T(z, z));
    r.rhs_cross[o] = rm * j.W(z, z) * j.H(x, x);
    r.lhs_diag[o] = std::abs(T(x, x));
    r.rhs_diag[o] = 2.0 * rm * j.W(x, x) * j.H(x, x);
    const double m1 = r.rhs_cross[o] - r.lhs_cross[o];
    const double m2 = r.rhs_diag[o] - r.lhs_diag[o];
    r.margin = std::min({r.margin, m1, m2});
    if (m1 < -tolerance * (1.0 + r.rhs_cross[o]) || m2 < -tolerance * (1.0 + r.rhs_diag[o])) r.holds = false;
  }
  return r;
}

CoordinateReport coordinate_inequality_check(const PotentialField& f, int node, double tolerance) {
  if (!f.grid->is_active(node)) throw Error(Errc::kStencilOutOfDomain, "stencil out of domain: node is not active");
  return coordinate_inequality_from_jet(derivatives_at(f, node, 4), tolerance);
}

namespace {

template <class Fn>
double gauss_line(Vec2 p, Vec2 nu, double R, int panels, Fn&& fn) {
  static const double xg[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
  static const double wg[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  const double width = 2 * R / panels;
  double s = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double c = -R + (k + 0.5) * width;
    for (int q = 0; q < 3; ++q) s += 0.5 * width * wg[q] * fn(p + (c + 0.5 * width * xg[q]) * nu);
  }
  return s;
}

}  // namespace

double segment_trace_integral(const FieldInterpolator& interp, Vec2 p, Vec2 nu, double R, int panels) {
  const DelzantPolygon& poly = *interp.field().polygon;
  if (poly.margin(p - R * nu) <= 0.0 || poly.margin(p + R * nu) <= 0.0)
    throw Error(Errc::kSegmentClipped, "segment clipped: leaves the polygon");
  return gauss_line(p, nu, R, panels, [&](Vec2 x) { return interp.hessian(x).inverse().trace(); });
}

double segment_directional_integral(const FieldInterpolator& interp, Vec2 p, Vec2 nu, Vec2 zeta, double R,
                                    int panels) {
  const DelzantPolygon& poly = *interp.field().polygon;
  if (poly.margin(p - R * nu) <= 0.0 || poly.margin(p + R * nu) <= 0.0)
    throw Error(Errc::kSegmentClipped, "segment clipped: leaves the polygon");
  return gauss_line(p, nu, R, panels, [&](Vec2 x) { return interp.hessian(x).inverse().quad(zeta); });
}

}  // namespace abreuflow
