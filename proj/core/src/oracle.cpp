#include "tnloss/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tnloss {

/// Textbook closed forms for the three fundamental t-norm logics, written
/// directly from their standard definitions with no shared code paths with
/// the generator machinery. Used only as an independent reference in tests
/// and available to the CLI for spot checks.
double oracle_tnorm(OracleLogic lg, OracleConn conn, double x, double y) {
  switch (conn) {
    case OracleConn::TNorm:
      switch (lg) {
        case OracleLogic::Godel: return std::min(x, y);
        case OracleLogic::Lukasiewicz: return std::max(0.0, x + y - 1.0);
        case OracleLogic::Product: return x * y;
      }
      break;
    case OracleConn::TConorm:
      switch (lg) {
        case OracleLogic::Godel: return std::max(x, y);
        case OracleLogic::Lukasiewicz: return std::min(1.0, x + y);
        case OracleLogic::Product: return x + y - x * y;
      }
      break;
    case OracleConn::Residuum:
      switch (lg) {
        case OracleLogic::Godel: return x <= y ? 1.0 : y;
        case OracleLogic::Lukasiewicz: return std::min(1.0, 1.0 - x + y);
        case OracleLogic::Product: return x <= y ? 1.0 : y / x;
      }
      break;
    case OracleConn::Biresiduum:
      switch (lg) {
        case OracleLogic::Godel: return x == y ? 1.0 : std::min(x, y);
        case OracleLogic::Lukasiewicz: return 1.0 - std::fabs(x - y);
        case OracleLogic::Product: return x == y ? 1.0 : std::min(x / y, y / x);
      }
      break;
    case OracleConn::WeakConj: return std::min(x, y);
    case OracleConn::WeakDisj: return std::max(x, y);
    case OracleConn::ResidualNeg:
      switch (lg) {
        case OracleLogic::Godel:
        case OracleLogic::Product: return x == 0.0 ? 1.0 : 0.0;
        case OracleLogic::Lukasiewicz: return 1.0 - x;
      }
      break;
    case OracleConn::StrongNeg: return 1.0 - x;
    case OracleConn::MaterialImpl:
      switch (lg) {
        case OracleLogic::Godel: return std::max(1.0 - x, y);
        case OracleLogic::Lukasiewicz: return std::min(1.0, 1.0 - x + y);
        case OracleLogic::Product: return 1.0 - x + x * y;
      }
      break;
  }
  throw std::logic_error("unhandled oracle connective");
}

}  // namespace tnloss
