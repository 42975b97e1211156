#pragma once

#include <cstdint>
#include <string>

#include "abreuflow/field.hpp"

namespace abreuflow {

struct RunConfig {
  std::string polygon;           // path; resolved relative to the config file
  double h = 0.0;
  int collar_width = 3;
  double epsilon0 = 0.0;
  double t_end = 0.0;
  double dt_initial = 0.0;
  double c_cfl = 0.15;
  std::string perturbation = "none";  // none | sine | quadratic | random
  double amplitude = 0.0;
  std::uint64_t seed = 1;
  std::string output_dir;
  int diagnostics_cadence = 100;
  int snapshot_cadence = 0;      // 0: initial and final snapshots only
  int geodesic_radius = 2;
  double m_radius = 0.1;
  int m_directions = 8;
  int anchor_stride = 2;
  int threads = 1;
  double energy_tolerance = 1e-10;
  Reference reference = Reference::kGuillemin;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// Flat `key = value` text with `#` comments. Errors carry "line L, column C".
RunConfig parse_config(const std::string& text, const std::string& base_dir = "");
RunConfig load_config(const std::string& path);
// Canonical form: every key, sorted, reals in %.17g.
std::string serialize_config(const RunConfig& c);
void validate_config(const RunConfig& c, const DelzantPolygon& polygon);

// Initial perturbation v0 sampled on every in-polygon node.
void apply_perturbation(PotentialField& f, const std::string& family, double amplitude, std::uint64_t seed);

}  // namespace abreuflow
