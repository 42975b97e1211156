#include <cmath>
#include <cstdio>
#include <fstream>

#include "abreuflow/error.hpp"
#include "abreuflow/geometry.hpp"
#include "abreuflow/parallel.hpp"

namespace abreuflow {

GeometrySnapshot compute_snapshot(const PotentialField& f, double t, int threads, bool with_q) {
  const Grid& g = *f.grid;
  GeometrySnapshot s;
  s.t = t;
  s.slot.assign(g.size(), -1);
  s.nodes.resize(g.active.size());
  for (std::size_t k = 0; k < g.active.size(); ++k) s.slot[g.active[k]] = int(k);

  std::vector<Jet> jets(g.active.size());
  parallel_for(int(g.active.size()), threads, [&](int b, int e) {
    for (int k = b; k < e; ++k) jets[k] = derivatives_at(f, g.active[k], 4);
  });
  parallel_for(int(g.active.size()), threads, [&](int b, int e) {
    for (int k = b; k < e; ++k) {
      const int idx = g.active[k];
      const Jet& u = jets[k];
      NodeGeometry& n = s.nodes[k];
      n.node = idx;
      n.hessian = u.hessian();
      const InverseCofactor ic = inverse_and_cofactor(n.hessian);
      n.inverse = ic.inverse;
      n.det = ic.det;
      const SymEigen ev = eigen(n.hessian);
      n.eig_min = ev.min;
      n.eig_max = ev.max;
      n.A = abreu_from_jet(u);
      n.A_cofactor = abreu_cofactor_from_jet(u);
      n.rm = rm_contraction_from_jet(u);
      if (with_q && q_available(g, idx)) {
        Jet nb[9];
        const int i = g.col(idx), j = g.row(idx);
        for (int dj = -1; dj <= 1; ++dj)
          for (int di = -1; di <= 1; ++di) nb[(dj + 1) * 3 + (di + 1)] = jets[s.slot[g.index(i + di, j + dj)]];
        const QValue q = q_from_jets(nb, g.h);
        n.has_q = true;
        n.grad_rm = q.grad_rm;
        n.hess_rm = q.hess_rm;
        n.Q = q.q;
      }
    }
  });
  double sum = 0.0;
  for (const auto& n : s.nodes) sum += n.A;
  s.Abar = s.nodes.empty() ? 0.0 : sum / double(s.nodes.size());
  return s;
}

void write_snapshot_csv(const GeometrySnapshot& s, const Grid& g, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw Error(Errc::kIo, "cannot write " + path);
    out << "x1,x2,A,rm,grad_rm,hess_rm,Q,eig_min,eig_max,trace_inv\n";
    char buf[512];
    for (const auto& n : s.nodes) {
      const Vec2 x = g.position(n.node);
      const double nan = std::nan("");
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", x.x, x.y, n.A,
                    n.rm, n.has_q ? n.grad_rm : nan, n.has_q ? n.hess_rm : nan, n.has_q ? n.Q : nan, n.eig_min,
                    n.eig_max, n.inverse.trace());
      out << buf;
    }
    if (!out) throw Error(Errc::kIo, "write failed for " + path);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) throw Error(Errc::kIo, "cannot rename onto " + path);
}

}  // namespace abreuflow
