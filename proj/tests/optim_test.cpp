#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "tnloss/optim.hpp"

using namespace tnloss;

TEST_CASE("fixed-lr gradient descent takes exact steps") {
  Optimizer opt(OptimizerConfig::fixed_gd(0.1), 3);
  std::vector<double> p = {1.0, -2.0, 0.5};
  opt.step(p, {10.0, 0.0, -4.0});
  CHECK(p[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(p[1] == -2.0);
  CHECK(p[2] == doctest::Approx(0.9).epsilon(1e-15));
  opt.step(p, {1.0, 1.0, 1.0});
  CHECK(p[1] == doctest::Approx(-2.1).epsilon(1e-15));
}

TEST_CASE("adam matches the reference update") {
  const double lr = 0.1, b1 = 0.9, b2 = 0.999, eps = 1e-8;
  OptimizerConfig cfg = OptimizerConfig::adam(lr);
  Optimizer opt(cfg, 1);
  std::vector<double> p = {2.0};

  // Step 1, gradient 0.5. Bias-corrected m = g, v = g^2, so the step is
  // lr * g / (|g| + eps) regardless of the betas.
  opt.step(p, {0.5});
  double m = (1 - b1) * 0.5;
  double v = (1 - b2) * 0.25;
  double expect = 2.0 - lr * (m / (1 - b1)) / (std::sqrt(v / (1 - b2)) + eps);
  CHECK(p[0] == doctest::Approx(expect).epsilon(1e-14));

  // Step 2, gradient -1.0, with accumulated moments and t = 2 corrections.
  opt.step(p, {-1.0});
  m = b1 * m + (1 - b1) * -1.0;
  v = b2 * v + (1 - b2) * 1.0;
  const double mh = m / (1 - b1 * b1);
  const double vh = v / (1 - b2 * b2);
  expect -= lr * mh / (std::sqrt(vh) + eps);
  CHECK(p[0] == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("adam handles zero gradients without drift") {
  Optimizer opt(OptimizerConfig::adam(0.5), 2);
  std::vector<double> p = {1.0, 1.0};
  opt.step(p, {0.0, 0.0});
  CHECK(p[0] == 1.0);
  CHECK(p[1] == 1.0);
}

TEST_CASE("construction and step shapes are validated") {
  CHECK_THROWS_AS(Optimizer(OptimizerConfig::adam(), 0), std::invalid_argument);
  CHECK_THROWS_AS(Optimizer(OptimizerConfig::adam(), -3), std::invalid_argument);
  Optimizer opt(OptimizerConfig::fixed_gd(0.1), 2);
  std::vector<double> p = {1.0, 2.0};
  CHECK_THROWS_AS(opt.step(p, {1.0}), std::invalid_argument);
  std::vector<double> wrong = {1.0};
  CHECK_THROWS_AS(opt.step(wrong, {1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("method names parse") {
  CHECK(OptimizerConfig::parse_method("gd") == OptimizerConfig::Method::FixedLrGd);
  CHECK(OptimizerConfig::parse_method("adam") == OptimizerConfig::Method::Adam);
  CHECK_THROWS_AS(OptimizerConfig::parse_method("sgd"), std::invalid_argument);
  CHECK(OptimizerConfig::fixed_gd(0.2).lr == 0.2);
  CHECK(OptimizerConfig::adam(0.01).method == OptimizerConfig::Method::Adam);
}
