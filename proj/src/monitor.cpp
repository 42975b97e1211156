#include "abreuflow/monitor.hpp"

#include <cmath>

#include "abreuflow/error.hpp"
#include "abreuflow/geodesic.hpp"
#include "abreuflow/interpolate.hpp"

namespace abreuflow {

DiagnosticsRecord theorem_monitors(const GeometrySnapshot& snap, const PotentialField& f, const MonitorOptions& opt) {
  const Grid& g = *f.grid;
  const DelzantPolygon& poly = *f.polygon;
  const double eps = opt.epsilon0;
  if (!(eps > 0.0) || inset(poly, 2 * eps).empty())
    throw Error(Errc::kEpsilonTooLarge, "epsilon too large: inset P_{2 eps} is empty");

  DiagnosticsRecord r;
  r.t = snap.t;
  AbreuOperator op(f);
  std::vector<double> A;
  std::vector<Sym2> W;
  if (!op.evaluate(f.v, A, &W, opt.threads)) throw MetricDegenerate(min_active_eigenvalue(f));
  r.Abar = op.mean(A);
  r.E = op.energy(A, r.Abar);
  r.D = op.dissipation(A, W);

  const auto in_eps = inset_nodes(g, eps);
  const auto in_2eps = inset_nodes(g, 2 * eps);
  r.eig_min = INFINITY;
  r.eig_max = -INFINITY;
  double trace = 0.0;
  for (const auto& n : snap.nodes) {
    if (in_eps[n.node]) {
      r.eig_min = std::min(r.eig_min, n.eig_min);
      r.eig_max = std::max(r.eig_max, n.eig_max);
    }
    const double area = clipped_cell_area(poly, g.position(n.node), g.h, eps);
    if (area > 0.0) trace += area * n.inverse.trace();
  }
  r.trace_int = trace;
  if (!std::isfinite(r.eig_min)) throw Error(Errc::kEpsilonTooLarge, "epsilon too large: no active nodes in P_eps");

  const FieldInterpolator interp(f);
  r.M_hat = m_condition_estimate(interp, opt.m).value;

  const MetricGraph graph(interp, active_set(g), opt.geodesic_radius);
  const auto dist = distance_to_inset_boundary(graph, eps);
  r.Qd2_max = 0.0;
  r.dist_eps = INFINITY;
  for (const auto& n : snap.nodes) {
    const double d = dist[n.node];
    if (in_eps[n.node] && n.has_q && std::isfinite(d)) r.Qd2_max = std::max(r.Qd2_max, n.Q * d * d);
    if (in_2eps[n.node]) r.dist_eps = std::min(r.dist_eps, d);
  }
  if (!std::isfinite(r.dist_eps)) throw Error(Errc::kUnreachable, "unreachable: P_{2 eps} not connected to the boundary of P_eps");
  r.osc_exceed_area = 0.0;
  return r;
}

OscillationReport hessian_oscillation_check(const PotentialField& a, double t1, const PotentialField& b, double t2,
                                            double integrated_dissipation, double slack) {
  const Grid& ga = *a.grid;
  const Grid& gb = *b.grid;
  if (a.polygon->hash() != b.polygon->hash() || ga.nx != gb.nx || ga.ny != gb.ny || ga.h != gb.h ||
      !(ga.origin == gb.origin) || t2 < t1)
    throw Error(Errc::kIncomparableStates, "incomparable states: different runs or reversed times");
  OscillationReport r;
  const double tau = t2 - t1;
  const double budget = tau * std::max(0.0, integrated_dissipation);
  r.threshold = std::sqrt(budget) + slack;
  r.bound = budget / (r.threshold * r.threshold);
  constexpr double kPi = 3.14159265358979323846;
  Vec2 dirs[8];
  for (int k = 0; k < 8; ++k) dirs[k] = {std::cos(kPi * k / 8), std::sin(kPi * k / 8)};
  const double cell = ga.h * ga.h;
  for (int idx : ga.active) {
    const Sym2 ha = derivatives_at(a, idx, 2).hessian();
    const Sym2 hb = derivatives_at(b, idx, 2).hessian();
    double osc = 0.0;
    for (const Vec2& nu : dirs) osc = std::max(osc, std::abs(std::log(hb.quad(nu)) - std::log(ha.quad(nu))));
    r.max_oscillation = std::max(r.max_oscillation, osc);
    if (osc > r.threshold) r.exceed_area += cell;
  }
  r.within_bound = r.exceed_area <= r.bound;
  return r;
}

BadLineReport bad_line_monitor(const FieldInterpolator& interp, double threshold, double R, double epsilon0) {
  const PotentialField& f = interp.field();
  const Grid& g = *f.grid;
  BadLineReport rep;
  rep.min_ratio = INFINITY;
  const auto in_eps = inset_nodes(g, epsilon0);
  for (int idx : g.active) {
    if (!in_eps[idx]) continue;
    const Sym2 hs = derivatives_at(f, idx, 2).hessian();
    const SymEigen ev = eigen(hs);
    if (!(ev.min < threshold)) continue;
    const Vec2 zeta = ev.min_vector;
    const Vec2 dir = ev.max_vector;
    const Vec2 p = g.position(idx);
    BadLineEntry e;
    e.node = idx;
    e.eig_min = ev.min;
    try {
      e.directional_integral = segment_directional_integral(interp, p, dir, zeta, R);
      e.trace_integral = segment_trace_integral(interp, p, dir, R);
    } catch (const Error&) {
      continue;
    }
    e.ratio = e.eig_min * e.directional_integral;
    rep.min_ratio = std::min(rep.min_ratio, e.ratio);
    rep.entries.push_back(e);
  }
  if (rep.entries.empty()) rep.min_ratio = 0.0;
  return rep;
}

CsvWriter::CsvWriter(const std::string& path, const std::string& header_lines) : path_(path), tmp_(path + ".tmp") {
  file_ = std::fopen(tmp_.c_str(), "wb");
  if (!file_) throw Error(Errc::kIo, "cannot write " + path);
  write_line(header_lines);
}

CsvWriter::~CsvWriter() {
  if (file_) {
    std::fclose(file_);
    std::remove(tmp_.c_str());
  }
}

void CsvWriter::write_line(const std::string& line) {
  if (!file_) throw Error(Errc::kIo, "writer already closed: " + path_);
  if (std::fputs(line.c_str(), file_) < 0 || std::fflush(file_) != 0) throw Error(Errc::kIo, "write failed for " + path_);
}

void CsvWriter::finish() {
  if (!file_) return;
  const bool ok = std::fclose(file_) == 0;
  file_ = nullptr;
  if (!ok || std::rename(tmp_.c_str(), path_.c_str()) != 0) throw Error(Errc::kIo, "cannot finalize " + path_);
}

std::string diagnostics_header() {
  return "# abreuflow diagnostics v1\nt,E,D,Abar,eig_min,eig_max,trace_int,M_hat,Qd2_max,dist_eps,osc_exceed_area\n";
}

std::string format_record(const DiagnosticsRecord& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.t, r.E, r.D,
                r.Abar, r.eig_min, r.eig_max, r.trace_int, r.M_hat, r.Qd2_max, r.dist_eps, r.osc_exceed_area);
  return buf;
}

std::string ledger_header() { return "# abreuflow ledger v1\nstep,t,dt,energy,dissipation,accepted\n"; }

std::string format_ledger(const LedgerRow& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%ld,%.17g,%.17g,%.17g,%.17g,%d\n", r.step, r.t, r.dt, r.energy, r.dissipation,
                r.accepted ? 1 : 0);
  return buf;
}

}  // namespace abreuflow
