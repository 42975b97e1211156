#include "abreuflow/flow.hpp"

#include <cmath>

#include "abreuflow/error.hpp"
#include "abreuflow/geometry.hpp"
#include "abreuflow/parallel.hpp"
#include "abreuflow/stencil.hpp"

namespace abreuflow {

namespace {

// One-dimensional second-order windows restricted to active nodes.
bool active_window(const Grid& g, int i, int j, int di, int dj, int order, Stencil1D& s) {
  int lo = 0, hi = 0;
  while (lo > -3 && g.is_active(i + (lo - 1) * di, j + (lo - 1) * dj)) --lo;
  while (hi < 3 && g.is_active(i + (hi + 1) * di, j + (hi + 1) * dj)) ++hi;
  return shifted_stencil(order, lo, hi, s);
}

// Abreu scalar on `len` consecutive active nodes of a row; returns false if D^2u fails to be positive definite.
bool abreu_row(const double* __restrict c, std::ptrdiff_t s, const double* const* r, double* __restrict out,
               double* __restrict pivot, int len, double ih2, double ih3, double ih4) {
  for (int i = 0; i < len; ++i) {
    const double* x = c + i;
    const double* up = x + s;
    const double* dn = x - s;
    const double x0 = x[0];
    const double uxx = r[0][i] + (x[1] - 2 * x0 + x[-1]) * ih2;
    const double uxy = r[1][i] + (up[1] - dn[1] - up[-1] + dn[-1]) * 0.25 * ih2;
    const double uyy = r[2][i] + (up[0] - 2 * x0 + dn[0]) * ih2;
    const double t0 = r[3][i] + (-0.5 * x[-2] + x[-1] - x[1] + 0.5 * x[2]) * ih3;
    const double t1 = r[4][i] + ((up[1] - dn[1]) - 2 * (up[0] - dn[0]) + (up[-1] - dn[-1])) * 0.5 * ih3;
    const double t2 = r[5][i] + ((up[1] - up[-1]) - 2 * (x[1] - x[-1]) + (dn[1] - dn[-1])) * 0.5 * ih3;
    const double t3 = r[6][i] + (-0.5 * x[-2 * s] + dn[0] - up[0] + 0.5 * x[2 * s]) * ih3;
    const double q0 = r[7][i] + (x[-2] - 4 * x[-1] + 6 * x0 - 4 * x[1] + x[2]) * ih4;
    const double d3u = -0.5 * up[-2] + up[-1] - up[1] + 0.5 * up[2];
    const double d3d = -0.5 * dn[-2] + dn[-1] - dn[1] + 0.5 * dn[2];
    const double q1 = r[8][i] + 0.5 * (d3u - d3d) * ih4;
    const double q2 =
        r[9][i] + ((up[1] - 2 * up[0] + up[-1]) - 2 * (x[1] - 2 * x0 + x[-1]) + (dn[1] - 2 * dn[0] + dn[-1])) * ih4;
    const double* rt = x + 1;
    const double* lf = x - 1;
    const double d3r = -0.5 * rt[-2 * s] + rt[-s] - rt[s] + 0.5 * rt[2 * s];
    const double d3l = -0.5 * lf[-2 * s] + lf[-s] - lf[s] + 0.5 * lf[2 * s];
    const double q3 = r[10][i] + 0.5 * (d3r - d3l) * ih4;
    const double q4 = r[11][i] + (x[-2 * s] - 4 * dn[0] + 6 * x0 - 4 * up[0] + x[2 * s]) * ih4;

    const double det = uxx * uyy - uxy * uxy;
    pivot[i] = det < uxx ? det : uxx;
    const double t[4] = {t0, t1, t2, t3}, q[5] = {q0, q1, q2, q3, q4};
    out[i] = abreu_closed_form(uxx, uxy, uyy, t, q);
  }
  for (int i = 0; i < len; ++i)
    if (!(pivot[i] > 0.0)) return false;
  return true;
}

}  // namespace

AbreuOperator::AbreuOperator(const PotentialField& f) : grid_(f.grid) {
  const Grid& g = *grid_;
  const std::size_t n = g.active.size();
  ref_.assign(12 * n, 0.0);
  std::vector<int> slot(g.size(), -1);
  for (std::size_t k = 0; k < n; ++k) slot[g.active[k]] = int(k);
  for (std::size_t k = 0; k < n; ++k) {
    const Jet r = reference_eval(f, g.position(g.active[k]), 4);
    for (int a = 0; a < 3; ++a) ref_[a * n + k] = r.d2[a];
    for (int a = 0; a < 4; ++a) ref_[(3 + a) * n + k] = r.d3[a];
    for (int a = 0; a < 5; ++a) ref_[(7 + a) * n + k] = r.d4[a];
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (!runs_.empty() && runs_.back().node0 + runs_.back().len == g.active[k] &&
        runs_.back().slot0 + runs_.back().len == int(k) && g.row(g.active[k]) == g.row(runs_.back().node0))
      ++runs_.back().len;
    else
      runs_.push_back({g.active[k], int(k), 1});
  }
  dstencil_.resize(n);
  has_dstencil_.assign(n, 0);
  const double ih2 = 1.0 / (g.h * g.h);
  for (std::size_t k = 0; k < n; ++k) {
    const int idx = g.active[k], i = g.col(idx), j = g.row(idx);
    Stencil1D x2, y2, x1, y1;
    if (!active_window(g, i, j, 1, 0, 2, x2) || !active_window(g, i, j, 0, 1, 2, y2) ||
        !active_window(g, i, j, 1, 0, 1, x1) || !active_window(g, i, j, 0, 1, 1, y1))
      continue;
    bool ok = true;
    SecondDerivativeStencil& st = dstencil_[k];
    for (std::size_t a = 0; a < x2.offsets.size(); ++a)
      st.xx.push_back({slot[g.index(i + x2.offsets[a], j)], x2.weights[a] * ih2});
    for (std::size_t b = 0; b < y2.offsets.size(); ++b)
      st.yy.push_back({slot[g.index(i, j + y2.offsets[b])], y2.weights[b] * ih2});
    for (std::size_t b = 0; b < y1.offsets.size() && ok; ++b)
      for (std::size_t a = 0; a < x1.offsets.size(); ++a) {
        const double w = x1.weights[a] * y1.weights[b];
        if (w == 0.0) continue;
        const int s = g.valid(i + x1.offsets[a], j + y1.offsets[b]) ? slot[g.index(i + x1.offsets[a], j + y1.offsets[b])] : -1;
        if (s < 0) {
          ok = false;
          break;
        }
        st.xy.push_back({s, w * ih2});
      }
    if (ok) has_dstencil_[k] = 1;
  }
}

bool AbreuOperator::evaluate(const std::vector<double>& v, std::vector<double>& A, std::vector<Sym2>* W,
                             int threads) const {
  const Grid& g = *grid_;
  const std::size_t n = g.active.size();
  A.resize(n);
  if (W) W->resize(n);
  const int s = g.nx;
  const double h = g.h;
  const double ih2 = 1.0 / (h * h), ih3 = ih2 / h, ih4 = ih2 * ih2;
  std::vector<unsigned char> ok(runs_.size(), 1);
  parallel_for(int(runs_.size()), threads, [&](int rb, int re) {
    std::vector<double> pivot(g.nx);
    for (int run = rb; run < re; ++run) {
      const Run& seg = runs_[run];
      const double* c = &v[seg.node0];
      const double* r[12];
      for (int a = 0; a < 12; ++a) r[a] = &ref_[a * n + seg.slot0];
      double* out = &A[seg.slot0];
      const bool good = abreu_row(c, s, r, out, pivot.data(), seg.len, ih2, ih3, ih4);
      ok[run] = (unsigned char)good;
      if (W)
        for (int i = 0; i < seg.len; ++i) {
          const double* x = c + i;
          const double uxx = r[0][i] + (x[1] - 2 * x[0] + x[-1]) * ih2;
          const double uxy = r[1][i] + (x[1 + s] - x[1 - s] - x[-1 + s] + x[-1 - s]) * 0.25 * ih2;
          const double uyy = r[2][i] + (x[s] - 2 * x[0] + x[-s]) * ih2;
          const double inv = 1.0 / (uxx * uyy - uxy * uxy);
          (*W)[seg.slot0 + i] = {uyy * inv, -uxy * inv, uxx * inv};
        }
    }
  });
  for (unsigned char x : ok)
    if (!x) return false;
  return true;
}

double AbreuOperator::mean(const std::vector<double>& A) const {
  double s = 0.0;
  for (double a : A) s += a;
  return A.empty() ? 0.0 : s / double(A.size());
}

double AbreuOperator::energy(const std::vector<double>& A, double Abar) const {
  double s = 0.0;
  for (double a : A) s += (a - Abar) * (a - Abar);
  return s * grid_->h * grid_->h;
}

double AbreuOperator::dissipation(const std::vector<double>& A, const std::vector<Sym2>& W) const {
  double s = 0.0;
  for (std::size_t k = 0; k < A.size(); ++k) {
    if (!has_dstencil_[k]) continue;
    const SecondDerivativeStencil& st = dstencil_[k];
    double axx = 0, axy = 0, ayy = 0;
    for (const auto& t : st.xx) axx += t.w * A[t.slot];
    for (const auto& t : st.xy) axy += t.w * A[t.slot];
    for (const auto& t : st.yy) ayy += t.w * A[t.slot];
    const Mat2 w = Mat2::from(W[k]);
    const Mat2 a{axx, axy, axy, ayy};
    const Mat2 m = w * a;
    s += (m * m).trace();
  }
  return s * grid_->h * grid_->h;
}

double calabi_energy(const PotentialField& f) {
  AbreuOperator op(f);
  std::vector<double> A;
  if (!op.evaluate(f.v, A, nullptr, 1)) throw MetricDegenerate(min_active_eigenvalue(f));
  return op.energy(A, op.mean(A));
}

double dissipation_rate(const PotentialField& f) {
  AbreuOperator op(f);
  std::vector<double> A;
  std::vector<Sym2> W;
  if (!op.evaluate(f.v, A, &W, 1)) throw MetricDegenerate(min_active_eigenvalue(f));
  return op.dissipation(A, W);
}

std::vector<double> rhs(const PotentialField& f) {
  AbreuOperator op(f);
  std::vector<double> A;
  if (!op.evaluate(f.v, A, nullptr, 1)) throw MetricDegenerate(min_active_eigenvalue(f));
  const double Abar = op.mean(A);
  std::vector<double> r(f.grid->size(), 0.0);
  for (std::size_t k = 0; k < A.size(); ++k) r[f.grid->active[k]] = Abar - A[k];
  return r;
}

double potential_distance(const PotentialField& a, const PotentialField& b) {
  const Grid& ga = *a.grid;
  const Grid& gb = *b.grid;
  if (a.polygon->hash() != b.polygon->hash() || ga.nx != gb.nx || ga.ny != gb.ny || ga.h != gb.h ||
      !(ga.origin == gb.origin) || a.reference != b.reference)
    throw Error(Errc::kIncompatibleFields, "incompatible fields: polygon or grid mismatch");
  double s = 0.0;
  for (int idx = 0; idx < ga.size(); ++idx) {
    if (!ga.in_polygon(idx)) continue;
    const double d = a.v[idx] - b.v[idx];
    s += ga.cell_area[idx] * d * d;
  }
  return std::sqrt(s);
}

bool step_rk4(const std::vector<double>& v, const std::vector<double>& k1, double dt, const RhsFunction& slope,
              std::vector<double>& out) {
  const std::size_t n = v.size();
  std::vector<double> k2, k3, k4, tmp(n);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = v[i] + 0.5 * dt * k1[i];
  if (!slope(tmp, k2)) return false;
  for (std::size_t i = 0; i < n; ++i) tmp[i] = v[i] + 0.5 * dt * k2[i];
  if (!slope(tmp, k3)) return false;
  for (std::size_t i = 0; i < n; ++i) tmp[i] = v[i] + dt * k3[i];
  if (!slope(tmp, k4)) return false;
  out.resize(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = v[i] + dt / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  return true;
}

FlowIntegrator::FlowIntegrator(FlowState& state, FlowOptions opt)
    : state_(state), opt_(opt), op_(state.field) {
  const double h = state_.field.h();
  dt_max_ = opt_.c_cfl * h * h * h * h;
  if (state_.dt <= 0.0) state_.dt = opt_.dt_initial > 0.0 ? std::min(opt_.dt_initial, dt_max_) : dt_max_;
  std::vector<double> k;
  if (!slope(state_.field.v, k, &A_, &W_, &Abar_)) throw MetricDegenerate(min_active_eigenvalue(state_.field));
  E_ = op_.energy(A_, Abar_);
  D_ = op_.dissipation(A_, W_);
  // energies below rounding of A are noise; never reject on them
  const double scale = 1e-12 * std::max(1.0, std::abs(Abar_));
  energy_floor_ = scale * scale * h * h * double(A_.size());
}

bool FlowIntegrator::slope(const std::vector<double>& v, std::vector<double>& k, std::vector<double>* A_out,
                           std::vector<Sym2>* W_out, double* abar_out) {
  std::vector<double> local;
  std::vector<double>& A = A_out ? *A_out : local;
  if (!op_.evaluate(v, A, W_out, opt_.threads)) return false;
  const double abar = op_.mean(A);
  if (abar_out) *abar_out = abar;
  const Grid& g = op_.grid();
  k.assign(v.size(), 0.0);
  for (std::size_t s = 0; s < A.size(); ++s) {
    if (!std::isfinite(A[s])) return false;
    k[g.active[s]] = abar - A[s];
  }
  return true;
}

LedgerRow FlowIntegrator::current_row() const {
  return {state_.step, state_.t, 0.0, E_, D_, true};
}

void FlowIntegrator::advance(double t_target, const std::function<void(const LedgerRow&)>& ledger,
                             const std::function<void(const FlowState&)>& on_accept) {
  const Grid& g = op_.grid();
  std::vector<double> k1(state_.field.v.size(), 0.0);
  for (std::size_t s = 0; s < A_.size(); ++s) k1[g.active[s]] = Abar_ - A_[s];
  RhsFunction f = [this](const std::vector<double>& v, std::vector<double>& k) {
    return slope(v, k, nullptr, nullptr, nullptr);
  };
  std::vector<double> candidate, A_new, k_dummy;
  std::vector<Sym2> W_new;
  while (state_.t < t_target) {
    const double remaining = t_target - state_.t;
    const bool truncated = state_.dt >= remaining;
    const double d = truncated ? remaining : state_.dt;
    double abar_new = 0.0, E_new = 0.0;
    bool ok = step_rk4(state_.field.v, k1, d, f, candidate);
    if (ok) ok = slope(candidate, k_dummy, &A_new, &W_new, &abar_new);
    if (ok) {
      E_new = op_.energy(A_new, abar_new);
      ok = std::isfinite(E_new) && E_new <= E_ * (1.0 + opt_.energy_tolerance) + energy_floor_;
    }
    if (!ok) {
      ++state_.rejections;
      state_.consecutive = 0;
      if (ledger) ledger({state_.step + 1, state_.t + d, d, E_new, 0.0, false});
      state_.dt = 0.5 * d;
      if (state_.dt < opt_.min_dt)
        throw Error(Errc::kFlowStalled, "flow stalled - suspected singularity at t = " + std::to_string(state_.t));
      continue;
    }
    const double D_new = op_.dissipation(A_new, W_new);
    state_.integrated_dissipation += 0.5 * d * (D_ + D_new);
    state_.field.v.swap(candidate);
    state_.t = truncated ? t_target : state_.t + d;
    ++state_.step;
    A_.swap(A_new);
    W_.swap(W_new);
    Abar_ = abar_new;
    E_ = E_new;
    D_ = D_new;
    k1.swap(k_dummy);
    if (!truncated && ++state_.consecutive >= 5) {
      state_.consecutive = 0;
      state_.dt = std::min(1.25 * state_.dt, dt_max_);
    }
    if (ledger) ledger({state_.step, state_.t, d, E_, D_, true});
    if (on_accept) on_accept(state_);
  }
}

}  // namespace abreuflow
