#pragma once

#include <string>

#include "abreuflow/field.hpp"

namespace abreuflow {

struct StoredState {
  PotentialField field;
  double t = 0.0;
  double integrated_dissipation = 0.0;
};

std::string format_snapshot(const PotentialField& f, double t, double integrated_dissipation);
void write_snapshot(const std::string& path, const PotentialField& f, double t, double integrated_dissipation);

// Throws Error(kSnapshotVersion) on a header version mismatch and
// Error(kSnapshotMalformed) on anything else that does not parse.
StoredState parse_snapshot(const std::string& text);
StoredState read_snapshot(const std::string& path);

}  // namespace abreuflow
