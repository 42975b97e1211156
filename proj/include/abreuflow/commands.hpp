#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "abreuflow/config.hpp"
#include "abreuflow/flow.hpp"
#include "abreuflow/monitor.hpp"

namespace abreuflow {

enum ExitCode { kExitOk = 0, kExitFailure = 1, kExitUsage = 2, kExitStalled = 3, kExitDegenerate = 4 };

struct RunHooks {
  std::function<void(const FlowState&)> on_accept;
};

struct RunResult {
  int exit_code = kExitOk;
  std::string message;
  FlowState state;
  std::vector<LedgerRow> ledger;
  std::vector<DiagnosticsRecord> diagnostics;
};

MonitorOptions monitor_options(const RunConfig& c);

// Runs a configured flow, writing ledger.csv, diagnostics.csv and snapshots/ under
// the output directory. Errors are reported through the exit code, never thrown.
RunResult execute_run(const RunConfig& c, const RunHooks& hooks = {});

struct DiagRequest {
  std::string snapshot;
  double epsilon0 = 0.0;
  std::string config;     // optional: monitor settings
  std::string reference;  // optional: earlier snapshot of the same run for the oscillation column
  std::string out_dir = ".";
};

int cmd_validate(const std::string& polygon_path, std::ostream& out, std::ostream& err);
int cmd_run(const std::string& config_path, std::ostream& out, std::ostream& err);
int cmd_oracle(const std::string& config_path, std::ostream& out, std::ostream& err);
int cmd_diag(const DiagRequest& req, std::ostream& out, std::ostream& err);

}  // namespace abreuflow
