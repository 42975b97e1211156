#pragma once

#include <stdexcept>
#include <string>

namespace abreuflow {

enum class Errc {
  kDegeneratePolygon,
  kInvalidInset,
  kBoundarySingularity,
  kGridTooCoarse,
  kStencilOutOfDomain,
  kMetricDegenerate,
  kInvalidScale,
  kNoAdmissibleSegments,
  kSegmentClipped,
  kUnreachable,
  kQUnavailable,
  kFlowStalled,
  kIncompatibleFields,
  kEpsilonTooLarge,
  kIncomparableStates,
  kSnapshotMalformed,
  kSnapshotVersion,
  kConfigParse,
  kIo,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// D^2 u lost positive definiteness somewhere.
class MetricDegenerate : public Error {
 public:
  explicit MetricDegenerate(double min_eigenvalue)
      : Error(Errc::kMetricDegenerate,
              "metric degenerate (min eigenvalue " + std::to_string(min_eigenvalue) + ")"),
        min_eigenvalue_(min_eigenvalue) {}
  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

}  // namespace abreuflow
