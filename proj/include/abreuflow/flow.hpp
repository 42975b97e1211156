#pragma once

#include <functional>
#include <vector>

#include "abreuflow/field.hpp"

namespace abreuflow {

// Fast evaluation of the Abreu scalar on all active nodes for a given v.
class AbreuOperator {
 public:
  explicit AbreuOperator(const PotentialField& f);

  // A per active slot (grid.active order). Optional W = (D^2u)^{-1} per slot.
  // Returns false (and stops filling) if D^2u is not positive definite somewhere.
  bool evaluate(const std::vector<double>& v, std::vector<double>& A, std::vector<Sym2>* W, int threads) const;

  double mean(const std::vector<double>& A) const;
  double energy(const std::vector<double>& A, double Abar) const;
  double dissipation(const std::vector<double>& A, const std::vector<Sym2>& W) const;
  const Grid& grid() const { return *grid_; }

 private:
  struct Weighted {
    int slot;
    double w;
  };
  struct SecondDerivativeStencil {
    std::vector<Weighted> xx, xy, yy;
  };

  struct Run {
    int node0, slot0, len;  // consecutive active nodes of one grid row
  };

  std::shared_ptr<const Grid> grid_;
  std::vector<double> ref_;  // 12 arrays over active slots: d2[3], d3[4], d4[5] of u0
  std::vector<Run> runs_;
  std::vector<SecondDerivativeStencil> dstencil_;
  std::vector<unsigned char> has_dstencil_;
};

double calabi_energy(const PotentialField& f);
double dissipation_rate(const PotentialField& f);
// Abar - A on active nodes, 0 elsewhere (indexed by grid node).
std::vector<double> rhs(const PotentialField& f);
double potential_distance(const PotentialField& a, const PotentialField& b);

using RhsFunction = std::function<bool(const std::vector<double>& v, std::vector<double>& k)>;
// Classical RK4; k1 is the slope at v. Returns false if any stage was invalid.
bool step_rk4(const std::vector<double>& v, const std::vector<double>& k1, double dt, const RhsFunction& slope,
              std::vector<double>& out);

struct FlowOptions {
  double c_cfl = 0.15;
  double dt_initial = 0.0;       // 0 selects dt_max = c_cfl h^4
  double energy_tolerance = 1e-10;
  int threads = 1;
  double min_dt = 1e-16;
};

struct FlowState {
  double t = 0.0;
  PotentialField field;
  double dt = 0.0;
  long step = 0;
  long rejections = 0;
  int consecutive = 0;
  double integrated_dissipation = 0.0;
};

struct LedgerRow {
  long step = 0;
  double t = 0.0;
  double dt = 0.0;
  double energy = 0.0;
  double dissipation = 0.0;
  bool accepted = true;
};

class FlowIntegrator {
 public:
  // Throws MetricDegenerate if the initial state is not positive definite.
  FlowIntegrator(FlowState& state, FlowOptions opt);

  double energy() const { return E_; }
  double dissipation() const { return D_; }
  double abar() const { return Abar_; }
  double dt_max() const { return dt_max_; }
  LedgerRow current_row() const;

  // Advances to t_target. Throws Error(kFlowStalled) on dt underflow; the state
  // then holds the last accepted step.
  void advance(double t_target, const std::function<void(const LedgerRow&)>& ledger = {},
               const std::function<void(const FlowState&)>& on_accept = {});

 private:
  bool slope(const std::vector<double>& v, std::vector<double>& k, std::vector<double>* A_out,
             std::vector<Sym2>* W_out, double* abar_out);

  FlowState& state_;
  FlowOptions opt_;
  AbreuOperator op_;
  double dt_max_;
  double energy_floor_;
  std::vector<double> A_;
  std::vector<Sym2> W_;
  double Abar_ = 0.0, E_ = 0.0, D_ = 0.0;
};

}  // namespace abreuflow
