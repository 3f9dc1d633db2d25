#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tnloss/generator.hpp"

namespace tnloss {

/// Operations a compiled objective can contain. GenEval applies the
/// generator g to a truth value (with the epsilon floor described in
/// LossGraph::atom_epsilon); GenPinv applies its pseudo-inverse.
enum class OpKind {
  Const,
  Pred,
  Add,
  Sub,
  Mul,
  Div,
  Neg,
  Min,
  Max,
  Abs,
  ClampMin0,
  GenEval,
  GenPinv,
  Sum,
};

const char* op_name(OpKind k);

/// A predicate applied to concrete individuals, e.g. p1(i3) or cite(i0,i4).
struct GroundAtom {
  std::string predicate;
  std::vector<std::string> individuals;
  bool operator==(const GroundAtom&) const = default;
  bool operator<(const GroundAtom& o) const {
    if (predicate != o.predicate) return predicate < o.predicate;
    return individuals < o.individuals;
  }
};

struct GraphNode {
  OpKind op = OpKind::Const;
  double value = 0.0;          // Const only
  int atom = -1;               // Pred only: index into LossGraph::atoms()
  std::vector<int32_t> args;   // operand node ids
};

/// A DAG of arithmetic over ground-atom truth values. Nodes are created
/// through the emit_* helpers, which value-number every node so structurally
/// identical subexpressions share one id. Node ids are topologically ordered
/// (operands always precede users).
class LossGraph {
 public:
  explicit LossGraph(Generator g, double atom_epsilon = 1e-7);

  const Generator& generator() const noexcept { return gen_; }
  /// Truth values below this floor are lifted to it inside GenEval so strict
  /// generators stay finite for learnable atoms; exact 0 is NOT floored (it
  /// maps to g's zero limit), preserving the semantics of given predicates.
  double atom_epsilon() const noexcept { return eps_; }

  int emit_const(double v);
  int emit_pred(const GroundAtom& atom);
  int emit_add(int a, int b);
  int emit_sub(int a, int b);
  int emit_mul(int a, int b);
  int emit_div(int a, int b);
  int emit_neg(int a);
  int emit_min(int a, int b);
  int emit_max(int a, int b);
  int emit_abs(int a);
  int emit_clamp_min0(int a);
  int emit_gen_eval(int a);
  int emit_gen_pinv(int a);
  int emit_sum(std::vector<int32_t> args);

  void set_output(int id);
  int output() const noexcept { return output_; }

  const std::vector<GraphNode>& nodes() const noexcept { return nodes_; }
  const std::vector<GroundAtom>& atoms() const noexcept { return atoms_; }
  /// Index of an atom if already interned, else -1.
  int find_atom(const GroundAtom& a) const;

  /// Number of nodes with the given op (for simplification reports).
  int count_ops(OpKind k) const;

  /// Deterministic text listing: one line per node plus a trailing output
  /// line; doubles rendered shortest-round-trip.
  std::string listing() const;

 private:
  int intern(GraphNode n);

  Generator gen_;
  double eps_;
  std::vector<GraphNode> nodes_;
  std::vector<GroundAtom> atoms_;
  std::map<GroundAtom, int> atom_ids_;
  std::map<std::string, int> value_numbers_;
  int output_ = -1;
};

}  // namespace tnloss
