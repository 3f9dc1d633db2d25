#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tnloss/graph.hpp"

namespace tnloss {

/// Raised when a forward pass produces NaN; infinities are legitimate
/// extended-real values for strict generators and do not fault.
class NumericFault : public std::runtime_error {
 public:
  NumericFault(const std::string& msg, int node) : std::runtime_error(msg), node_(node) {}
  int node() const noexcept { return node_; }

 private:
  int node_;
};

/// Reverse-mode evaluator over a LossGraph. One tape instance owns the
/// forward value and adjoint buffers and can be re-run against new atom
/// values every epoch without reallocating.
class Tape {
 public:
  explicit Tape(const LossGraph& graph);

  /// atom_values[i] is the truth of graph.atoms()[i]. Returns the output
  /// value; throws NumericFault naming the first node that went NaN.
  double forward(const std::vector<double>& atom_values);

  /// Seeds the output adjoint with 1 and propagates. Requires forward() first.
  void backward();

  /// d(output)/d(atom i) after backward(). Subgradient conventions: min/max
  /// route to the first operand attaining the value; |.|' at 0 is +1;
  /// clamp' at the boundary is 0.
  const std::vector<double>& atom_adjoints() const noexcept { return atom_adj_; }

  double value(int node) const { return values_.at(static_cast<size_t>(node)); }
  const LossGraph& graph() const noexcept { return *graph_; }

 private:
  const LossGraph* graph_;
  std::vector<double> values_;
  std::vector<double> adjoints_;
  std::vector<double> atom_adj_;
};

/// One-shot evaluation without gradients.
double graph_eval(const LossGraph& graph, const std::vector<double>& atom_values);

/// True when any non-smooth node (min/max/abs/clamp, or a generator clamp
/// boundary) sits within `margin` of its kink at these atom values — points
/// a finite-difference check should avoid.
bool near_graph_kink(const LossGraph& graph, const std::vector<double>& atom_values,
                     double margin);

struct GradCheckReport {
  int checked = 0;
  int resampled = 0;  // points discarded for sitting too close to a kink
  double max_rel_err = 0.0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  int worst_index = -1;
  bool pass = false;
};

/// Central-difference check of an arbitrary scalar objective. `f` maps a
/// parameter vector to a value, `analytic` returns the gradient at `point`.
/// `near_kink(p)` lets the caller veto points where the objective is
/// non-differentiable; vetoed coordinates are perturbed and retried.
GradCheckReport grad_check(const std::function<double(const std::vector<double>&)>& f,
                           const std::function<std::vector<double>(const std::vector<double>&)>& analytic,
                           std::vector<double> point,
                           const std::function<bool(const std::vector<double>&)>& near_kink,
                           double h = 1e-5, double tol = 1e-4, unsigned seed = 0);

}  // namespace tnloss
