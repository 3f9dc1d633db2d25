#pragma once

#include <memory>
#include <stdexcept>
#include <string>

#include "tnloss/ast.hpp"
#include "tnloss/context.hpp"
#include "tnloss/graph.hpp"

namespace tnloss {

/// How quantifiers are aggregated over their domain: Generated extends the
/// generator's own t-norm/t-conorm across all groundings; MinMax uses the
/// lattice min/max instead.
enum class QuantifierMode { Generated, MinMax };

/// How an existential is handled in Generated mode when compiling a loss:
/// TConorm keeps the generated t-conorm (costly: it needs the inverse),
/// Max replaces it with the lattice max (a common relaxation).
enum class ExistsMode { TConorm, Max };

struct CompileOptions {
  QuantifierMode quantifier_mode = QuantifierMode::Generated;
  ExistsMode exists_mode = ExistsMode::TConorm;
  /// Prune universally quantified implications whose antecedent is a single
  /// given-predicate atom down to that predicate's support set.
  bool prune_guarded = true;
  double atom_epsilon = 1e-7;
};

class CompileError : public std::runtime_error {
 public:
  explicit CompileError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Compiles the truth value of a closed formula: the graph output evaluates
/// the formula's degree of truth in [0,1] under the generator's semantics.
LossGraph compile_truth(const Formula& f, const Generator& g,
                        const GroundingContext& ctx, const KnowledgeBase& kb,
                        const CompileOptions& opts = {});

/// Compiles the loss of a closed formula: the generator applied to the
/// formula's truth, algebraically simplified so that generator/inverse pairs
/// cancel wherever the connective structure allows it.
LossGraph compile_loss(const Formula& f, const Generator& g,
                       const GroundingContext& ctx, const KnowledgeBase& kb,
                       const CompileOptions& opts = {});

/// Weighted sum of per-rule losses over the whole KB.
LossGraph kb_loss(const KnowledgeBase& kb, const Generator& g,
                  const GroundingContext& ctx, const CompileOptions& opts = {});

struct SimplificationReport {
  int naive_gen_eval = 0;
  int naive_gen_pinv = 0;
  int simplified_gen_eval = 0;
  int simplified_gen_pinv = 0;
  int naive_nodes = 0;
  int simplified_nodes = 0;
  double max_value_diff = 0.0;  // |g(truth) - loss| over sampled atom values
  int samples = 0;
};

/// Crosses the simplified loss against generator-of-truth on random atom
/// assignments; infinities on both sides at once count as a zero diff.
SimplificationReport verify_simplification(const Formula& f, const Generator& g,
                                           const GroundingContext& ctx,
                                           const KnowledgeBase& kb,
                                           const CompileOptions& opts,
                                           int samples, unsigned seed);

/// True when the formula's loss compiles with no pseudo-inverse nodes at all
/// (the fully simplifiable fragment).
bool has_simplification_property(const Formula& f, const CompileOptions& opts);

}  // namespace tnloss
