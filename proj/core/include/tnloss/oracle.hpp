#pragma once

#include "tnloss/truth.hpp"

namespace tnloss {

/// Closed-form truth tables of the three fundamental fuzzy logics.
/// Reference implementation used only as a test oracle; the Godel column is
/// not reachable from any generator (its t-norm is idempotent, hence not
/// generated) and exists here alone.
enum class OracleLogic { Godel, Lukasiewicz, Product };

enum class OracleConn {
  TNorm,         // x (x) y
  TConorm,       // x (+) y
  Residuum,      // x => y
  Biresiduum,    // x <=> y
  WeakConj,      // min
  WeakDisj,      // max
  ResidualNeg,   // ~x (y ignored)
  StrongNeg,     // 1-x (y ignored)
  MaterialImpl,  // x -> y
};

double oracle_tnorm(OracleLogic logic, OracleConn conn, double x, double y = 0.0);

}  // namespace tnloss
