#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "abreuflow/flow.hpp"
#include "abreuflow/geometry.hpp"
#include "abreuflow/segment.hpp"

namespace abreuflow {

struct DiagnosticsRecord {
  double t = 0.0;
  double E = 0.0;
  double D = 0.0;
  double Abar = 0.0;
  double eig_min = 0.0;
  double eig_max = 0.0;
  double trace_int = 0.0;
  double M_hat = 0.0;
  double Qd2_max = 0.0;
  double dist_eps = 0.0;
  double osc_exceed_area = 0.0;
};

struct MonitorOptions {
  double epsilon0 = 0.2;
  int geodesic_radius = 2;
  MConditionOptions m;
  int threads = 1;
};

// Monitors of one state; osc_exceed_area is left at 0 (see hessian_oscillation_check).
DiagnosticsRecord theorem_monitors(const GeometrySnapshot& snap, const PotentialField& f, const MonitorOptions& opt);

struct OscillationReport {
  double max_oscillation = 0.0;
  double threshold = 0.0;     // sqrt(tau * int D) + slack
  double exceed_area = 0.0;   // measure of nodes whose oscillation exceeds the threshold
  double bound = 0.0;         // Chebyshev bound tau * int D / threshold^2
  bool within_bound = true;
};

// Compares log(nu^T D^2u nu) between two states of the same run over 8 directions.
OscillationReport hessian_oscillation_check(const PotentialField& a, double t1, const PotentialField& b, double t2,
                                            double integrated_dissipation, double slack = 1e-9);

struct BadLineEntry {
  int node = -1;
  double eig_min = 0.0;
  double directional_integral = 0.0;  // int zeta^T u^{ij} zeta ds, zeta the small eigenvector
  double trace_integral = 0.0;
  double ratio = 0.0;                 // eig_min * directional_integral
};

struct BadLineReport {
  std::vector<BadLineEntry> entries;
  double min_ratio = 0.0;
};

// Nodes in P_eps0 whose smaller Hessian eigenvalue is below `threshold`; segments of
// half-length R run orthogonally to the small eigenvector.
BadLineReport bad_line_monitor(const FieldInterpolator& interp, double threshold, double R, double epsilon0);

// CSV stream written to a temporary file and renamed into place by finish().
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::string& header_lines);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void write_line(const std::string& line);
  void finish();
  const std::string& path() const { return path_; }

 private:
  std::string path_, tmp_;
  std::FILE* file_ = nullptr;
};

std::string diagnostics_header();
std::string format_record(const DiagnosticsRecord& r);
std::string ledger_header();
std::string format_ledger(const LedgerRow& r);

}  // namespace abreuflow
