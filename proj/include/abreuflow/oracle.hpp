#pragma once

#include <string>
#include <vector>

#include "abreuflow/config.hpp"
#include "abreuflow/field.hpp"
#include "abreuflow/jet.hpp"

namespace abreuflow {

// a * sin(<k1, x> + phi1) * sin(<k2, x> + phi2): analytic test perturbation whose
// family is closed under affine changes of coordinates.
struct PlaneWaveProduct {
  double amplitude = 0.0;
  Vec2 k1, k2;
  double phi1 = 0.0, phi2 = 0.0;

  Jet jet(Vec2 x) const;  // value and derivatives up to fourth order
  // The same function expressed in x' = S x + b.
  PlaneWaveProduct transformed(const int S[2][2], Vec2 b) const;
};

struct OracleResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

// Polygon image under x' = S x + b with S unimodular.
std::vector<Edge> transform_edges(const std::vector<Edge>& edges, const int S[2][2], Vec2 b);

// Builds the run's initial field from a config (polygon, grid, reference, perturbation, affine gauge).
PotentialField build_initial_field(const RunConfig& c);

std::vector<OracleResult> run_oracle_suite(const RunConfig& c, const PotentialField& f);
std::string oracle_report_json(const std::vector<OracleResult>& results);

}  // namespace abreuflow
