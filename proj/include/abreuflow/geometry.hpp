#pragma once

#include <array>
#include <string>
#include <vector>

#include "abreuflow/field.hpp"
#include "abreuflow/jet.hpp"

namespace abreuflow {

// Hessian H = D^2 u and W = H^{-1} with their first and second x-derivatives.
struct InverseHessianJet {
  Mat2 H, W;
  Mat2 dH[2], dW[2];
  Mat2 ddH[2][2], ddW[2][2];
};

InverseHessianJet inverse_hessian_jet(const Jet& u);

// A = -sum_ij d_i d_j u^{ij} from the Hessian, third (t) and fourth (q) derivatives;
// t[k], q[k] carry k differentiations in x2. Requires a positive definite Hessian.
inline double abreu_closed_form(double uxx, double uxy, double uyy, const double* t, const double* q) {
  const double inv = 1.0 / (uxx * uyy - uxy * uxy);
  const double p = uyy * inv, r = -uxy * inv, s = uxx * inv;
  const double term1 = p * p * q[0] + 4 * p * r * q[1] + (4 * r * r + 2 * p * s) * q[2] + 4 * r * s * q[3] + s * s * q[4];
  // N_k = W (d_k H) W
  const double a0 = p * t[0] + r * t[1], a1 = p * t[1] + r * t[2], a2 = r * t[0] + s * t[1], a3 = r * t[1] + s * t[2];
  const double n0xx = a0 * p + a1 * r, n0xy = a0 * r + a1 * s, n0yy = a2 * r + a3 * s;
  const double b0 = p * t[1] + r * t[2], b1 = p * t[2] + r * t[3], b2 = r * t[1] + s * t[2], b3 = r * t[2] + s * t[3];
  const double n1xx = b0 * p + b1 * r, n1xy = b0 * r + b1 * s, n1yy = b2 * r + b3 * s;
  auto quad = [&](double x0, double x1, double y0, double y1) {
    return uxx * x0 * y0 + uxy * (x0 * y1 + x1 * y0) + uyy * x1 * y1;
  };
  const double m0 = n0xx + n1xy, m1 = n0xy + n1yy;
  const double cross = quad(n0xx, n0xy, n0xx, n0xy) + quad(n1xy, n1yy, n1xy, n1yy) + 2.0 * quad(n1xx, n1xy, n0xy, n0yy);
  return term1 - quad(m0, m1, m0, m1) - cross;
}

// A = -sum_ij d_i d_j u^{ij}, closed form in the jet of u.
double abreu_from_jet(const Jet& u);
// A = -U^{ij} (1/det)_{,ij}.
double abreu_cofactor_from_jet(const Jet& u);
// |Rm| via the contraction of T^{ij}_{kl} = d_k d_l u^{ij}.
double rm_contraction_from_jet(const Jet& u);

// Curvature of g = u_ij dx^i dx^j + u^ij dtheta_i dtheta_j in (x1, x2, theta1, theta2).
using Tensor4 = std::array<double, 256>;  // index a*64 + b*16 + c*4 + d

struct BlockMetric {
  double g[4][4];
  double ginv[4][4];
  double gamma[4][4][4];      // gamma[a][b][c] = Gamma^a_{bc}
  double dgamma[2][4][4][4];  // x-derivatives of Gamma
};

BlockMetric block_metric(const Jet& u);
Tensor4 riemann_lowered(const BlockMetric& m);
double tensor_norm(const double* t, int rank, const double ginv[4][4]);
double rm_christoffel_from_jet(const Jet& u);

struct AbreuValue {
  double primary = 0.0;
  double cofactor = 0.0;
};

AbreuValue abreu_scalar(const PotentialField& f, int node);
double curvature_norm(const PotentialField& f, int node);

struct QValue {
  double rm = 0.0;
  double grad_rm = 0.0;
  double hess_rm = 0.0;
  double q = 0.0;
};

// True when the 3x3 neighbourhood of the node is active.
bool q_available(const Grid& g, int node);
// jets[(dj + 1) * 3 + (di + 1)] are the jets of u at the neighbours.
QValue q_from_jets(const Jet jets[9], double h);
QValue q_quantity(const PotentialField& f, int node);

struct AverageScalar {
  double active_mean = 0.0;     // mean of A over active nodes
  double integral = 0.0;        // whole-polygon quadrature of A
  double quadrature_mean = 0.0; // integral / Area(P)
  double lattice_prediction = 0.0;  // 2 sum sigma / Area(P)
};

AverageScalar average_scalar(const PotentialField& f);

struct NodeGeometry {
  int node = -1;
  Sym2 hessian;
  Sym2 inverse;
  double det = 0.0;
  double A = 0.0;
  double A_cofactor = 0.0;
  double rm = 0.0;
  bool has_q = false;
  double grad_rm = 0.0;
  double hess_rm = 0.0;
  double Q = 0.0;
  double eig_min = 0.0;
  double eig_max = 0.0;
};

struct GeometrySnapshot {
  double t = 0.0;
  double Abar = 0.0;
  std::vector<NodeGeometry> nodes;  // one per active node, in grid order
  std::vector<int> slot;            // grid index -> position in nodes, or -1

  const NodeGeometry* at(int grid_index) const {
    const int s = slot[grid_index];
    return s < 0 ? nullptr : &nodes[s];
  }
};

GeometrySnapshot compute_snapshot(const PotentialField& f, double t, int threads = 1, bool with_q = true);
void write_snapshot_csv(const GeometrySnapshot& s, const Grid& g, const std::string& path);

}  // namespace abreuflow
