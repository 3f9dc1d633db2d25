#pragma once

#include <string>
#include <vector>

#include "tnloss/generator.hpp"

namespace tnloss {

struct AxiomResult {
  std::string name;
  double max_err = 0.0;
  bool pass = false;
};

/// Checks the t-norm axioms (commutativity, associativity, identity,
/// annihilator, monotonicity) plus the Archimedean property and De Morgan
/// duality on an n-by-n uniform grid over [0,1]^2. Used by `check` and the
/// acceptance suite.
std::vector<AxiomResult> run_axiom_checks(const Generator& g, int grid_n, double tol);

}  // namespace tnloss
