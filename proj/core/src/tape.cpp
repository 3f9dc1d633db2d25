#include "tnloss/tape.hpp"

#include <cmath>
#include <random>
#include <string>

namespace tnloss {

Tape::Tape(const LossGraph& graph)
    : graph_(&graph),
      values_(graph.nodes().size(), 0.0),
      adjoints_(graph.nodes().size(), 0.0),
      atom_adj_(graph.atoms().size(), 0.0) {
  if (graph.output() < 0) throw std::logic_error("graph has no output node");
}

double Tape::forward(const std::vector<double>& atom_values) {
  const auto& nodes = graph_->nodes();
  if (atom_values.size() != graph_->atoms().size())
    throw std::invalid_argument("atom value count does not match graph");
  const Generator& g = graph_->generator();
  const double eps = graph_->atom_epsilon();
  for (size_t i = 0; i < nodes.size(); ++i) {
    const GraphNode& n = nodes[i];
    const auto a = [&](int k) { return values_[static_cast<size_t>(n.args[static_cast<size_t>(k)])]; };
    double v = 0.0;
    switch (n.op) {
      case OpKind::Const: v = n.value; break;
      case OpKind::Pred: v = atom_values[static_cast<size_t>(n.atom)]; break;
      case OpKind::Add: v = a(0) + a(1); break;
      case OpKind::Sub: {
        const double x = a(0), y = a(1);
        v = x - y;
        // Extended-real convention for g-space differences: two losses at the
        // same infinite limit cancel to 0. A strict generator's residuum of
        // two totally false operands is 1, whose loss is 0 — not NaN.
        if (std::isinf(x) && std::isinf(y) && (x > 0.0) == (y > 0.0)) v = 0.0;
        break;
      }
      case OpKind::Mul: v = a(0) * a(1); break;
      case OpKind::Div: v = a(0) / a(1); break;
      case OpKind::Neg: v = -a(0); break;
      case OpKind::Min: v = std::min(a(0), a(1)); break;
      case OpKind::Max: v = std::max(a(0), a(1)); break;
      case OpKind::Abs: v = std::fabs(a(0)); break;
      case OpKind::ClampMin0: v = a(0) > 0.0 ? a(0) : 0.0; break;
      case OpKind::GenEval: {
        const double x = a(0);
        if (x <= 0.0)
          v = g.zero_limit();
        else if (x < eps)
          v = g.eval(eps);
        else if (x >= 1.0)
          v = 0.0;
        else
          v = g.eval(x);
        break;
      }
      case OpKind::GenPinv: {
        const double y = a(0);
        v = y <= 0.0 ? 1.0 : g.pseudo_inverse(y);
        break;
      }
      case OpKind::Sum: {
        for (int32_t arg : n.args) v += values_[static_cast<size_t>(arg)];
        break;
      }
    }
    if (std::isnan(v))
      throw NumericFault("forward pass produced NaN at node " + std::to_string(i) + " (" +
                             op_name(n.op) + ")",
                         static_cast<int>(i));
    values_[i] = v;
  }
  return values_[static_cast<size_t>(graph_->output())];
}

void Tape::backward() {
  const auto& nodes = graph_->nodes();
  std::fill(adjoints_.begin(), adjoints_.end(), 0.0);
  std::fill(atom_adj_.begin(), atom_adj_.end(), 0.0);
  adjoints_[static_cast<size_t>(graph_->output())] = 1.0;
  const Generator& g = graph_->generator();
  const double eps = graph_->atom_epsilon();
  for (size_t ri = nodes.size(); ri-- > 0;) {
    const double w = adjoints_[ri];
    if (w == 0.0) continue;  // also keeps 0 * inf from minting NaN
    const GraphNode& n = nodes[ri];
    const auto val = [&](int k) { return values_[static_cast<size_t>(n.args[static_cast<size_t>(k)])]; };
    auto adj = [&](int k) -> double& { return adjoints_[static_cast<size_t>(n.args[static_cast<size_t>(k)])]; };
    switch (n.op) {
      case OpKind::Const: break;
      case OpKind::Pred: atom_adj_[static_cast<size_t>(n.atom)] += w; break;
      case OpKind::Add:
        adj(0) += w;
        adj(1) += w;
        break;
      case OpKind::Sub:
        adj(0) += w;
        adj(1) -= w;
        break;
      case OpKind::Mul:
        adj(0) += w * val(1);
        adj(1) += w * val(0);
        break;
      case OpKind::Div:
        adj(0) += w / val(1);
        adj(1) -= w * val(0) / (val(1) * val(1));
        break;
      case OpKind::Neg: adj(0) -= w; break;
      case OpKind::Min:
        // Subgradient: route to the first operand attaining the value.
        adj(val(0) <= val(1) ? 0 : 1) += w;
        break;
      case OpKind::Max:
        adj(val(0) >= val(1) ? 0 : 1) += w;
        break;
      case OpKind::Abs: adj(0) += val(0) >= 0.0 ? w : -w; break;
      case OpKind::ClampMin0:
        if (val(0) > 0.0) adj(0) += w;
        break;
      case OpKind::GenEval: {
        const double x = val(0);
        if (x > eps && x < 1.0) adj(0) += w * g.derivative(x);
        // Below eps the evaluation is floored flat; at or past the
        // endpoints the clamp is flat too.
        break;
      }
      case OpKind::GenPinv: {
        const double y = val(0);
        if (y >= 0.0) adj(0) += w * g.pseudo_inverse_derivative(y);
        break;
      }
      case OpKind::Sum:
        for (size_t k = 0; k < n.args.size(); ++k)
          adjoints_[static_cast<size_t>(n.args[k])] += w;
        break;
    }
  }
}

double graph_eval(const LossGraph& graph, const std::vector<double>& atom_values) {
  Tape t(graph);
  return t.forward(atom_values);
}

bool near_graph_kink(const LossGraph& graph, const std::vector<double>& atom_values,
                     double margin) {
  Tape t(graph);
  try {
    t.forward(atom_values);
  } catch (const NumericFault&) {
    return true;
  }
  const auto& nodes = graph.nodes();
  const double eps = graph.atom_epsilon();
  for (size_t i = 0; i < nodes.size(); ++i) {
    const GraphNode& n = nodes[i];
    const auto a = [&](int k) { return t.value(n.args[static_cast<size_t>(k)]); };
    switch (n.op) {
      case OpKind::Min:
      case OpKind::Max:
        if (std::fabs(a(0) - a(1)) < margin) return true;
        break;
      case OpKind::Abs:
      case OpKind::ClampMin0:
        if (std::fabs(a(0)) < margin) return true;
        break;
      case OpKind::GenEval:
        // Kinks at the epsilon floor and at the [0,1] clamp edges.
        if (std::fabs(a(0) - eps) < margin || std::fabs(a(0) - 1.0) < margin ||
            std::fabs(a(0)) < margin)
          return true;
        break;
      case OpKind::GenPinv:
        if (std::fabs(a(0)) < margin) return true;
        if (std::isfinite(graph.generator().zero_limit()) &&
            std::fabs(a(0) - graph.generator().zero_limit()) < margin)
          return true;
        break;
      default: break;
    }
  }
  return false;
}

GradCheckReport grad_check(const std::function<double(const std::vector<double>&)>& f,
                           const std::function<std::vector<double>(const std::vector<double>&)>& analytic,
                           std::vector<double> point,
                           const std::function<bool(const std::vector<double>&)>& near_kink,
                           double h, double tol, unsigned seed) {
  GradCheckReport rep;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-5e-3, 5e-3);
  if (near_kink) {
    for (int tries = 0; tries < 200 && near_kink(point); ++tries) {
      for (double& x : point) x += jitter(rng);
      ++rep.resampled;
    }
  }
  const std::vector<double> an = analytic(point);
  if (an.size() != point.size())
    throw std::invalid_argument("analytic gradient size mismatch");
  std::vector<double> at = point;
  for (size_t i = 0; i < point.size(); ++i) {
    at[i] = point[i] + h;
    const double fp = f(at);
    at[i] = point[i] - h;
    const double fm = f(at);
    at[i] = point[i];
    const double fd = (fp - fm) / (2.0 * h);
    const double denom = std::max({std::fabs(fd), std::fabs(an[i]), 1e-6});
    const double rel = std::fabs(fd - an[i]) / denom;
    ++rep.checked;
    if (rel > rep.max_rel_err) {
      rep.max_rel_err = rel;
      rep.worst_analytic = an[i];
      rep.worst_numeric = fd;
      rep.worst_index = static_cast<int>(i);
    }
  }
  rep.pass = rep.max_rel_err < tol;
  return rep;
}

}  // namespace tnloss
