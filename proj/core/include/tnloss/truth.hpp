#pragma once

#include <stdexcept>
#include <string>

namespace tnloss {

/// A degree of truth in [0,1]. Construction outside the interval throws.
class TruthValue {
 public:
  explicit TruthValue(double v) : v_(v) {
    if (!(v >= 0.0 && v <= 1.0))
      throw std::domain_error("truth value outside [0,1]: " + std::to_string(v));
  }
  double value() const noexcept { return v_; }

 private:
  double v_;
};

}  // namespace tnloss
