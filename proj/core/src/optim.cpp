#include "tnloss/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace tnloss {

OptimizerConfig OptimizerConfig::fixed_gd(double lr) {
  OptimizerConfig c;
  c.method = Method::FixedLrGd;
  c.lr = lr;
  return c;
}

OptimizerConfig OptimizerConfig::adam(double lr) {
  OptimizerConfig c;
  c.method = Method::Adam;
  c.lr = lr;
  return c;
}

OptimizerConfig::Method OptimizerConfig::parse_method(const std::string& name) {
  if (name == "gd") return Method::FixedLrGd;
  if (name == "adam") return Method::Adam;
  throw std::invalid_argument("unknown optimizer '" + name + "' (expected gd or adam)");
}

Optimizer::Optimizer(OptimizerConfig cfg, int n_params) : cfg_(cfg) {
  if (n_params < 1) throw std::invalid_argument("optimizer needs at least one parameter");
  if (cfg_.method == OptimizerConfig::Method::Adam) {
    m_.assign(static_cast<size_t>(n_params), 0.0);
    v_.assign(static_cast<size_t>(n_params), 0.0);
  }
}

void Optimizer::step(std::vector<double>& params, const std::vector<double>& grad) {
  if (params.size() != grad.size())
    throw std::invalid_argument("parameter/gradient size mismatch");
  if (cfg_.method == OptimizerConfig::Method::FixedLrGd) {
    for (size_t i = 0; i < params.size(); ++i) params[i] -= cfg_.lr * grad[i];
    return;
  }
  if (params.size() != m_.size())
    throw std::invalid_argument("optimizer was sized for a different model");
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (size_t i = 0; i < params.size(); ++i) {
    m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * grad[i];
    v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * grad[i] * grad[i];
    const double mhat = m_[i] / bc1;
    const double vhat = v_[i] / bc2;
    params[i] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
  }
}

}  // namespace tnloss
