#include "tnloss/graph.hpp"

#include <bit>
#include <cstdint>
#include <sstream>
#include <stdexcept>

#include "tnloss/util.hpp"

namespace tnloss {

const char* op_name(OpKind k) {
  switch (k) {
    case OpKind::Const: return "const";
    case OpKind::Pred: return "pred";
    case OpKind::Add: return "add";
    case OpKind::Sub: return "sub";
    case OpKind::Mul: return "mul";
    case OpKind::Div: return "div";
    case OpKind::Neg: return "neg";
    case OpKind::Min: return "min";
    case OpKind::Max: return "max";
    case OpKind::Abs: return "abs";
    case OpKind::ClampMin0: return "clampmin0";
    case OpKind::GenEval: return "geneval";
    case OpKind::GenPinv: return "genpinv";
    case OpKind::Sum: return "sum";
  }
  return "?";
}

LossGraph::LossGraph(Generator g, double atom_epsilon)
    : gen_(std::move(g)), eps_(atom_epsilon) {
  if (!(eps_ > 0.0 && eps_ < 1.0))
    throw std::invalid_argument("atom epsilon must lie in (0,1)");
}

int LossGraph::intern(GraphNode n) {
  std::string key = op_name(n.op);
  if (n.op == OpKind::Const) {
    key += ':';
    key += format_double(n.value);
  } else if (n.op == OpKind::Pred) {
    key += ':';
    key += std::to_string(n.atom);
  }
  for (int32_t a : n.args) {
    key += ',';
    key += std::to_string(a);
  }
  auto [it, fresh] = value_numbers_.try_emplace(std::move(key), static_cast<int>(nodes_.size()));
  if (fresh) nodes_.push_back(std::move(n));
  return it->second;
}

namespace {
int32_t checked(int id, size_t n) {
  if (id < 0 || static_cast<size_t>(id) >= n)
    throw std::out_of_range("graph node id out of range");
  return static_cast<int32_t>(id);
}
}  // namespace

int LossGraph::emit_const(double v) {
  GraphNode n;
  n.op = OpKind::Const;
  n.value = v;
  return intern(std::move(n));
}

int LossGraph::emit_pred(const GroundAtom& atom) {
  auto [it, fresh] = atom_ids_.try_emplace(atom, static_cast<int>(atoms_.size()));
  if (fresh) atoms_.push_back(atom);
  GraphNode n;
  n.op = OpKind::Pred;
  n.atom = it->second;
  return intern(std::move(n));
}

#define TNLOSS_BINOP(fn, K)                              \
  int LossGraph::fn(int a, int b) {                      \
    GraphNode n;                                         \
    n.op = OpKind::K;                                    \
    n.args = {checked(a, nodes_.size()), checked(b, nodes_.size())}; \
    return intern(std::move(n));                         \
  }

TNLOSS_BINOP(emit_add, Add)
TNLOSS_BINOP(emit_sub, Sub)
TNLOSS_BINOP(emit_mul, Mul)
TNLOSS_BINOP(emit_div, Div)
TNLOSS_BINOP(emit_min, Min)
TNLOSS_BINOP(emit_max, Max)
#undef TNLOSS_BINOP

#define TNLOSS_UNOP(fn, K)                       \
  int LossGraph::fn(int a) {                     \
    GraphNode n;                                 \
    n.op = OpKind::K;                            \
    n.args = {checked(a, nodes_.size())};        \
    return intern(std::move(n));                 \
  }

TNLOSS_UNOP(emit_neg, Neg)
TNLOSS_UNOP(emit_abs, Abs)
TNLOSS_UNOP(emit_clamp_min0, ClampMin0)
TNLOSS_UNOP(emit_gen_eval, GenEval)
TNLOSS_UNOP(emit_gen_pinv, GenPinv)
#undef TNLOSS_UNOP

int LossGraph::emit_sum(std::vector<int32_t> args) {
  if (args.empty()) return emit_const(0.0);
  if (args.size() == 1) return args[0];
  for (int32_t a : args) checked(a, nodes_.size());
  GraphNode n;
  n.op = OpKind::Sum;
  n.args = std::move(args);
  return intern(std::move(n));
}

void LossGraph::set_output(int id) {
  checked(id, nodes_.size());
  output_ = id;
}

int LossGraph::find_atom(const GroundAtom& a) const {
  auto it = atom_ids_.find(a);
  return it == atom_ids_.end() ? -1 : it->second;
}

int LossGraph::count_ops(OpKind k) const {
  int n = 0;
  for (const GraphNode& node : nodes_)
    if (node.op == k) ++n;
  return n;
}

std::string LossGraph::listing() const {
  std::ostringstream os;
  os << "generator " << gen_.spec_string() << '\n';
  for (size_t i = 0; i < nodes_.size(); ++i) {
    const GraphNode& n = nodes_[i];
    os << i << ' ' << op_name(n.op);
    if (n.op == OpKind::Const) {
      os << ' ' << format_double(n.value);
    } else if (n.op == OpKind::Pred) {
      const GroundAtom& a = atoms_[static_cast<size_t>(n.atom)];
      os << ' ' << a.predicate << '(';
      for (size_t j = 0; j < a.individuals.size(); ++j) {
        if (j) os << ',';
        os << a.individuals[j];
      }
      os << ')';
    } else {
      for (int32_t arg : n.args) os << ' ' << arg;
    }
    os << '\n';
  }
  os << "output " << output_ << '\n';
  return os.str();
}

}  // namespace tnloss
