#include "tnloss/checks.hpp"

#include <cmath>
#include <vector>

namespace tnloss {

namespace {

double T(const Generator& g, double x, double y) {
  return tnorm(g, TruthValue(x), TruthValue(y)).value();
}

double S(const Generator& g, double x, double y) {
  return tconorm(g, TruthValue(x), TruthValue(y)).value();
}

}  // namespace

std::vector<AxiomResult> run_axiom_checks(const Generator& g, int grid_n, double tol) {
  std::vector<double> pts;
  pts.reserve(static_cast<size_t>(grid_n));
  for (int i = 0; i < grid_n; ++i) pts.push_back(double(i) / double(grid_n - 1));

  std::vector<AxiomResult> out;
  auto record = [&](const std::string& name, double err) {
    out.push_back(AxiomResult{name, err, err <= tol});
  };

  double e_comm = 0.0, e_assoc = 0.0, e_ident = 0.0, e_annih = 0.0, e_mono = 0.0;
  double e_demorgan = 0.0, e_resid = 0.0;
  for (double x : pts) {
    e_ident = std::max(e_ident, std::fabs(T(g, x, 1.0) - x));
    e_annih = std::max(e_annih, std::fabs(T(g, x, 0.0)));
    for (double y : pts) {
      e_comm = std::max(e_comm, std::fabs(T(g, x, y) - T(g, y, x)));
      // De Morgan duality: S(x,y) = 1 - T(1-x, 1-y).
      e_demorgan = std::max(e_demorgan, std::fabs(S(g, x, y) - (1.0 - T(g, 1.0 - x, 1.0 - y))));
      // Residuation: T(x,z) <= y  iff  z <= residuum(x,y), checked via the
      // adjunction witness z* = residuum(x,y): T(x,z*) <= y must hold.
      const double r = residuum(g, TruthValue(x), TruthValue(y)).value();
      e_resid = std::max(e_resid, std::max(0.0, T(g, x, r) - y));
      for (double z : pts) {
        e_assoc = std::max(e_assoc, std::fabs(T(g, T(g, x, y), z) - T(g, x, T(g, y, z))));
        if (y <= z) e_mono = std::max(e_mono, T(g, x, y) - T(g, x, z));
      }
    }
  }
  record("commutativity", e_comm);
  record("associativity", e_assoc);
  record("identity", e_ident);
  record("annihilator", e_annih);
  record("monotonicity", e_mono);
  record("de_morgan", e_demorgan);
  record("residuation", e_resid);

  // Archimedean property: T(x,x) < x strictly inside (0,1).
  double e_arch = 0.0;
  bool arch_ok = true;
  for (double x : pts) {
    if (x <= 0.0 || x >= 1.0) continue;
    const double d = T(g, x, x) - x;
    if (d >= 0.0) arch_ok = false;
    e_arch = std::max(e_arch, d);
  }
  out.push_back(AxiomResult{"archimedean", std::max(0.0, e_arch), arch_ok});
  return out;
}

}  // namespace tnloss
