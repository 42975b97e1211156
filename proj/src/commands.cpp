#include "abreuflow/commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "abreuflow/error.hpp"
#include "abreuflow/geometry.hpp"
#include "abreuflow/oracle.hpp"
#include "abreuflow/snapshot_io.hpp"

namespace abreuflow {

namespace fs = std::filesystem;

namespace {

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case Errc::kFlowStalled:
      return kExitStalled;
    case Errc::kMetricDegenerate:
      return kExitDegenerate;
    case Errc::kConfigParse:
    case Errc::kIo:
    case Errc::kEpsilonTooLarge:
    case Errc::kDegeneratePolygon:
    case Errc::kGridTooCoarse:
    case Errc::kSnapshotMalformed:
    case Errc::kSnapshotVersion:
      return kExitUsage;
    default:
      return kExitFailure;
  }
}

std::string snapshot_name(long step) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "step_%08ld.snap", step);
  return buf;
}

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error(Errc::kIo, "cannot create output directory " + dir);
}

}  // namespace

MonitorOptions monitor_options(const RunConfig& c) {
  MonitorOptions m;
  m.epsilon0 = c.epsilon0;
  m.geodesic_radius = c.geodesic_radius;
  m.m = {c.m_radius, c.m_directions, c.anchor_stride};
  m.threads = c.threads;
  return m;
}

RunResult execute_run(const RunConfig& c, const RunHooks& hooks) {
  RunResult res;
  try {
    FlowState& st = res.state;
    st.field = build_initial_field(c);
    ensure_directory(c.output_dir);
    const std::string snap_dir = (fs::path(c.output_dir) / "snapshots").string();
    ensure_directory(snap_dir);

    FlowOptions opt;
    opt.c_cfl = c.c_cfl;
    opt.dt_initial = c.dt_initial;
    opt.energy_tolerance = c.energy_tolerance;
    opt.threads = c.threads;
    FlowIntegrator integ(st, opt);

    CsvWriter ledger((fs::path(c.output_dir) / "ledger.csv").string(), ledger_header());
    CsvWriter diag((fs::path(c.output_dir) / "diagnostics.csv").string(), diagnostics_header());
    const PotentialField initial = st.field;
    const MonitorOptions mopt = monitor_options(c);

    auto log_row = [&](const LedgerRow& r) {
      ledger.write_line(format_ledger(r));
      res.ledger.push_back(r);
    };
    long last_diag = -1;
    auto record = [&](const FlowState& s) {
      const GeometrySnapshot snap = compute_snapshot(s.field, s.t, c.threads);
      DiagnosticsRecord r = theorem_monitors(snap, s.field, mopt);
      r.osc_exceed_area = hessian_oscillation_check(initial, 0.0, s.field, s.t, s.integrated_dissipation).exceed_area;
      diag.write_line(format_record(r));
      res.diagnostics.push_back(r);
      last_diag = s.step;
    };
    auto save = [&](const FlowState& s, const std::string& name) {
      write_snapshot((fs::path(snap_dir) / name).string(), s.field, s.t, s.integrated_dissipation);
    };

    log_row(integ.current_row());
    record(st);
    save(st, snapshot_name(0));

    bool stalled = false;
    try {
      integ.advance(c.t_end, log_row, [&](const FlowState& s) {
        if (hooks.on_accept) hooks.on_accept(s);
        if (s.step % c.diagnostics_cadence == 0) record(s);
        if (c.snapshot_cadence > 0 && s.step % c.snapshot_cadence == 0) save(s, snapshot_name(s.step));
      });
    } catch (const Error& e) {
      if (e.code() != Errc::kFlowStalled) throw;
      stalled = true;
      res.message = e.what();
    }
    if (last_diag != st.step) record(st);
    save(st, "final.snap");
    ledger.finish();
    diag.finish();
    res.exit_code = stalled ? kExitStalled : kExitOk;
  } catch (const MetricDegenerate& e) {
    res.exit_code = kExitDegenerate;
    res.message = std::string("initial metric degenerate: ") + e.what();
  } catch (const Error& e) {
    res.exit_code = exit_code_for(e);
    res.message = e.what();
  } catch (const std::exception& e) {
    res.exit_code = kExitFailure;
    res.message = e.what();
  }
  return res;
}

int cmd_validate(const std::string& polygon_path, std::ostream& out, std::ostream& err) {
  std::vector<Edge> edges;
  try {
    edges = read_polygon_file(polygon_path);
  } catch (const Error& e) {
    err << e.what() << "\n";
    return kExitUsage;
  }
  try {
    const ValidationReport rep = validate_delzant(edges);
    if (rep.valid()) {
      const DelzantPolygon& p = *rep.polygon;
      out << "valid Delzant polygon: " << p.edges.size() << " edges, area " << p.area() << ", inradius "
          << p.inradius() << ", hash " << p.hash() << "\n";
      return kExitOk;
    }
    for (const auto& v : rep.violations) out << "violation: " << v << "\n";
    return kExitFailure;
  } catch (const Error& e) {
    out << "violation: " << e.what() << "\n";
    return kExitFailure;
  }
}

int cmd_run(const std::string& config_path, std::ostream& out, std::ostream& err) {
  RunConfig c;
  try {
    c = load_config(config_path);
  } catch (const Error& e) {
    err << e.what() << "\n";
    return kExitUsage;
  }
  const RunResult r = execute_run(c);
  if (r.exit_code != kExitOk) {
    err << r.message << "\n";
    return r.exit_code;
  }
  out << "run complete: t = " << r.state.t << ", accepted steps " << r.state.step << ", rejected "
      << r.state.rejections << ", output in " << c.output_dir << "\n";
  return kExitOk;
}

int cmd_oracle(const std::string& config_path, std::ostream& out, std::ostream& err) {
  try {
    const RunConfig c = load_config(config_path);
    const PotentialField f = build_initial_field(c);
    const auto results = run_oracle_suite(c, f);
    const std::string report = oracle_report_json(results);
    out << report;
    ensure_directory(c.output_dir);
    const std::string path = (fs::path(c.output_dir) / "oracle.json").string();
    {
      std::ofstream o(path + ".tmp");
      o << report;
      if (!o) throw Error(Errc::kIo, "cannot write " + path);
    }
    fs::rename(path + ".tmp", path);
    for (const auto& r : results)
      if (!r.passed) return kExitFailure;
    return kExitOk;
  } catch (const MetricDegenerate& e) {
    err << "initial metric degenerate: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << e.what() << "\n";
    return kExitFailure;
  }
}

int cmd_diag(const DiagRequest& req, std::ostream& out, std::ostream& err) {
  try {
    const StoredState s = read_snapshot(req.snapshot);
    MonitorOptions mopt;
    if (!req.config.empty()) mopt = monitor_options(load_config(req.config));
    mopt.epsilon0 = req.epsilon0;
    if (!(req.epsilon0 > 0) || !(req.epsilon0 < 0.5 * s.field.polygon->inradius()))
      throw Error(Errc::kEpsilonTooLarge, "epsilon too large: epsilon0 must lie in (0, inradius/2)");
    const GeometrySnapshot snap = compute_snapshot(s.field, s.t, mopt.threads);
    DiagnosticsRecord rec = theorem_monitors(snap, s.field, mopt);
    if (!req.reference.empty()) {
      const StoredState r = read_snapshot(req.reference);
      rec.osc_exceed_area =
          hessian_oscillation_check(r.field, r.t, s.field, s.t, s.integrated_dissipation - r.integrated_dissipation)
              .exceed_area;
    } else {
      rec.osc_exceed_area =
          hessian_oscillation_check(s.field, s.t, s.field, s.t, 0.0).exceed_area;
    }
    ensure_directory(req.out_dir);
    CsvWriter w((fs::path(req.out_dir) / "diagnostics.csv").string(), diagnostics_header());
    w.write_line(format_record(rec));
    w.finish();
    write_snapshot_csv(snap, *s.field.grid, (fs::path(req.out_dir) / "geometry.csv").string());
    out << format_record(rec);
    return kExitOk;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace abreuflow
