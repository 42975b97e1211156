#include <iostream>

#include "CLI11.hpp"
#include "abreuflow/commands.hpp"

int main(int argc, char** argv) {
  using namespace abreuflow;
  CLI::App app{"Calabi flow on toric surfaces in moment-polygon coordinates"};
  app.require_subcommand(1);

  std::string polygon_path;
  auto* validate = app.add_subcommand("validate", "Check that a polygon file describes a Delzant polygon");
  validate->add_option("polygon", polygon_path, "polygon file (lines of `nu_x nu_y c`)")->required();

  std::string run_config;
  auto* run = app.add_subcommand("run", "Run the flow described by a config file");
  run->add_option("config", run_config, "config file")->required();

  std::string oracle_config;
  auto* oracle = app.add_subcommand("oracle", "Run the cross-check suite on a config's initial field");
  oracle->add_option("config", oracle_config, "config file")->required();

  DiagRequest diag_req;
  auto* diag = app.add_subcommand("diag", "Recompute diagnostics for a stored snapshot");
  diag->add_option("snapshot", diag_req.snapshot, "snapshot file")->required();
  diag->add_option("--epsilon0", diag_req.epsilon0, "inset distance for the monitors")->required();
  diag->add_option("--config", diag_req.config, "config supplying monitor settings");
  diag->add_option("--reference", diag_req.reference, "earlier snapshot of the same run (oscillation column)");
  diag->add_option("--out", diag_req.out_dir, "output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  if (*validate) return cmd_validate(polygon_path, std::cout, std::cerr);
  if (*run) return cmd_run(run_config, std::cout, std::cerr);
  if (*oracle) return cmd_oracle(oracle_config, std::cout, std::cerr);
  return cmd_diag(diag_req, std::cout, std::cerr);
}
