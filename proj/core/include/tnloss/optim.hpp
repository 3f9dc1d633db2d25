#pragma once

#include <string>
#include <vector>

namespace tnloss {

struct OptimizerConfig {
  enum class Method { FixedLrGd, Adam };
  Method method = Method::Adam;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static OptimizerConfig fixed_gd(double lr);
  static OptimizerConfig adam(double lr = 1e-3);
  /// "gd" or "adam".
  static OptimizerConfig::Method parse_method(const std::string& name);
};

/// Stateful first-order optimizer over a flat parameter vector.
class Optimizer {
 public:
  Optimizer(OptimizerConfig cfg, int n_params);
  void step(std::vector<double>& params, const std::vector<double>& grad);
  const OptimizerConfig& config() const noexcept { return cfg_; }

 private:
  OptimizerConfig cfg_;
  std::vector<double> m_, v_;
  long t_ = 0;
};

}  // namespace tnloss
