#pragma once

#include <vector>

#include "abreuflow/geometry.hpp"
#include "abreuflow/interpolate.hpp"

namespace abreuflow {

// |(Du(p - R nu) - Du(p + R nu)) . nu| for one segment.
double m_condition_value(const FieldInterpolator& interp, Vec2 p, Vec2 nu, double R);

struct MConditionOptions {
  double R = 0.1;
  int directions = 8;   // equally spaced in [0, pi)
  int anchor_stride = 2;
};

struct MConditionEstimate {
  double value = 0.0;
  int admissible = 0;
  Vec2 argmax_p;
  Vec2 argmax_nu;
};

// Max over anchors (active nodes on a strided sub-lattice) and directions whose
// segment [p - 3R nu, p + 3R nu] lies strictly inside P. Throws "no admissible segments".
MConditionEstimate m_condition_estimate(const FieldInterpolator& interp, const MConditionOptions& opt);

// Samples on a lattice segment through grid nodes: p + m * step * h, m = -k..k.
struct SegmentSample {
  Vec2 p;
  Vec2 nu;        // unit direction
  double R = 0.0; // half length
  double delta = 0.0;  // spacing between samples
  std::vector<double> s;
  std::vector<double> H;   // u_ij nu^i nu^j
  std::vector<double> rm;  // |Rm|
  std::vector<Sym2> inverse;
};

// Throws "segment clipped" if any sample node is not active.
SegmentSample sample_lattice_segment(const PotentialField& f, int center_node, int step_i, int step_j, int k);

struct HessianBoundReport {
  double H0 = 0.0;
  double M = 0.0;              // integral of H over [-R, R]
  double rm_sq_integral = 0.0; // integral of |Rm|^2
  double C_integral = 0.0;     // reading 1: C = int |Rm|^2
  double C_root = 0.0;         // reading 2: C = sqrt(int |Rm|^2)
  double bound_integral = 0.0;
  double bound_root = 0.0;
  bool long_regime = false;    // R > 1
  bool holds_integral = false;
  bool holds_root = false;
  // differential inequality (1/H)'' <= |Rm| at interior samples
  double worst_margin = 0.0;   // min over samples of |Rm| + tol - (1/H)''
  bool differential_ok = true;
  int checked = 0;
};

HessianBoundReport hessian_segment_bound(const SegmentSample& seg, double M_value = -1.0);

struct CoordinateReport {
  // both orientations (x, z) = (x1, x2) and (x2, x1)
  double lhs_cross[2] = {0, 0}, rhs_cross[2] = {0, 0};  // |u^{zz}_{xx}| <= |Rm| u^{zz} u_{xx}
  double lhs_diag[2] = {0, 0}, rhs_diag[2] = {0, 0};    // |u^{xx}_{xx}| <= 2 |Rm| u^{xx} u_{xx}
  double margin = 0.0;  // min of rhs - lhs
  bool holds = true;
};

CoordinateReport coordinate_inequality_from_jet(const Jet& u, double tolerance = 1e-9);
CoordinateReport coordinate_inequality_check(const PotentialField& f, int node, double tolerance = 1e-9);

// int_{-R}^{R} Tr(u^{ij})(p + s nu) ds, composite 3-point Gauss with `panels` panels.
double segment_trace_integral(const FieldInterpolator& interp, Vec2 p, Vec2 nu, double R, int panels = 32);
// int_{-R}^{R} zeta^T u^{ij} zeta ds along the same segment.
double segment_directional_integral(const FieldInterpolator& interp, Vec2 p, Vec2 nu, Vec2 zeta, double R,
                                    int panels = 32);

}  // namespace abreuflow
