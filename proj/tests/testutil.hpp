#pragma once

// Shared helpers for the test suite: small KBs, grounding contexts, a random
// formula generator, and a direct tree-walking interpreter that serves as an
// independent reference for the graph compiler.

#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "tnloss/ast.hpp"
#include "tnloss/compile.hpp"
#include "tnloss/context.hpp"
#include "tnloss/generator.hpp"
#include "tnloss/graph.hpp"

namespace tnloss::testutil {

/// Four unary learnable predicates plus one unary and one binary given
/// predicate, one domain, and a placeholder rule so the KB validates.
inline KnowledgeBase small_kb() {
  KnowledgeBase kb;
  kb.domains.push_back({"D", -1});
  for (const char* p : {"a", "b", "c", "d"})
    kb.predicates.push_back({p, 1, PredicateBinding::Learnable});
  kb.predicates.push_back({"G", 1, PredicateBinding::Given});
  kb.predicates.push_back({"R", 2, PredicateBinding::Given});
  kb.rules.push_back({Formula::atom("a", {Term::constant("i0")}), 1.0, ""});
  return kb;
}

inline GroundingContext small_ctx(int n = 3) {
  GroundingContext ctx;
  std::vector<std::string> ids;
  for (int i = 0; i < n; ++i) ids.push_back("i" + std::to_string(i));
  ctx.domains["D"] = ids;
  GivenTable g;
  g.values[{"i0"}] = 1.0;
  g.values[{"i1"}] = 0.5;
  ctx.given["G"] = g;
  GivenTable r;
  r.values[{"i0", "i1"}] = 1.0;
  r.values[{"i1", "i2"}] = 0.75;
  ctx.given["R"] = r;
  return ctx;
}

/// Direct interpreter for closed formulas over explicit atom truth values.
/// Uses only the connective functions over TruthValue, never the graph.
inline TruthValue eval_formula(const Formula& f, const Generator& g,
                               const GroundingContext& ctx, const KnowledgeBase& kb,
                               const std::map<GroundAtom, double>& atom_values,
                               const CompileOptions& opts,
                               std::map<std::string, std::string>& binding) {
  auto recurse = [&](const Formula& sub) {
    return eval_formula(sub, g, ctx, kb, atom_values, opts, binding);
  };
  switch (f.kind()) {
    case Formula::Kind::Atom: {
      GroundAtom ga;
      ga.predicate = f.predicate();
      for (const Term& t : f.args())
        ga.individuals.push_back(t.kind == Term::Kind::Variable ? binding.at(t.name)
                                                                : t.name);
      const PredicateDecl* decl = kb.find_predicate(f.predicate());
      if (decl && decl->binding == PredicateBinding::Given)
        return TruthValue(ctx.given.at(f.predicate()).lookup(ga.individuals));
      return TruthValue(atom_values.at(ga));
    }
    case Formula::Kind::Not: return strong_neg(recurse(*f.lhs()));
    case Formula::Kind::ResNeg: return residual_neg(g, recurse(*f.lhs()));
    case Formula::Kind::StrongConj: return tnorm(g, recurse(*f.lhs()), recurse(*f.rhs()));
    case Formula::Kind::StrongDisj: return tconorm(g, recurse(*f.lhs()), recurse(*f.rhs()));
    case Formula::Kind::WeakConj: return weak_conj(recurse(*f.lhs()), recurse(*f.rhs()));
    case Formula::Kind::WeakDisj: return weak_disj(recurse(*f.lhs()), recurse(*f.rhs()));
    case Formula::Kind::Implies: return residuum(g, recurse(*f.lhs()), recurse(*f.rhs()));
    case Formula::Kind::Iff: return biresiduum(g, recurse(*f.lhs()), recurse(*f.rhs()));
    case Formula::Kind::Forall: {
      std::vector<TruthValue> ts;
      for (const std::string& ind : ctx.domain(f.domain())) {
        binding[f.var()] = ind;
        ts.push_back(recurse(*f.lhs()));
      }
      binding.erase(f.var());
      if (opts.quantifier_mode == QuantifierMode::MinMax) {
        TruthValue acc = ts.at(0);
        for (size_t i = 1; i < ts.size(); ++i) acc = weak_conj(acc, ts[i]);
        return acc;
      }
      return tnorm_nary(g, ts);
    }
    case Formula::Kind::Exists: {
      std::vector<TruthValue> ts;
      for (const std::string& ind : ctx.domain(f.domain())) {
        binding[f.var()] = ind;
        ts.push_back(recurse(*f.lhs()));
      }
      binding.erase(f.var());
      if (opts.quantifier_mode == QuantifierMode::Generated &&
          opts.exists_mode == ExistsMode::TConorm) {
        // n-ary generated t-conorm via duality with the t-norm.
        std::vector<TruthValue> dual;
        for (const TruthValue& t : ts) dual.push_back(strong_neg(t));
        return strong_neg(tnorm_nary(g, dual));
      }
      TruthValue acc = ts.at(0);
      for (size_t i = 1; i < ts.size(); ++i) acc = weak_disj(acc, ts[i]);
      return acc;
    }
  }
  throw std::logic_error("unhandled formula kind");
}

inline TruthValue eval_formula(const Formula& f, const Generator& g,
                               const GroundingContext& ctx, const KnowledgeBase& kb,
                               const std::map<GroundAtom, double>& atom_values,
                               const CompileOptions& opts = {}) {
  std::map<std::string, std::string> binding;
  return eval_formula(f, g, ctx, kb, atom_values, opts, binding);
}

/// Random formula trees. `lemma_fragment` restricts connectives to the set
/// whose compiled loss provably needs no pseudo-inverse nodes.
struct FormulaGen {
  std::mt19937_64 rng;
  bool lemma_fragment = true;
  bool allow_given = false;
  bool vars_only = false;  // text-format trees: no constant terms
  std::vector<std::string> preds{"a", "b", "c", "d"};
  std::vector<std::string> inds{"i0", "i1", "i2"};

  explicit FormulaGen(unsigned seed) : rng(seed) {}

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

  FormulaPtr atom(const std::string* var) {
    std::string p = preds[static_cast<size_t>(pick(static_cast<int>(preds.size())))];
    if (allow_given && pick(4) == 0) p = "G";
    Term t = var && (vars_only || pick(2) == 0)
                 ? Term::var(*var)
                 : Term::constant(inds[static_cast<size_t>(
                       pick(static_cast<int>(inds.size())))]);
    return Formula::atom(p, {t});
  }

  FormulaPtr tree(int depth, const std::string* var) {
    if (depth <= 0 || pick(4) == 0) return atom(var);
    const int n_binary = lemma_fragment ? 4 : 5;
    const int n_unary = lemma_fragment ? 1 : 2;
    const int k = pick(n_binary + n_unary);
    if (k < n_unary) {
      FormulaPtr inner = tree(depth - 1, var);
      return k == 0 ? Formula::res_neg(std::move(inner))
                    : Formula::negate(std::move(inner));
    }
    FormulaPtr l = tree(depth - 1, var);
    FormulaPtr r = tree(depth - 1, var);
    switch (k - n_unary) {
      case 0: return Formula::strong_conj(std::move(l), std::move(r));
      case 1: return Formula::weak_conj(std::move(l), std::move(r));
      case 2: return Formula::weak_disj(std::move(l), std::move(r));
      case 3: return Formula::implies(std::move(l), std::move(r));
      default: return Formula::strong_disj(std::move(l), std::move(r));
    }
  }

  /// A closed random formula: ground, or universally quantified over D.
  FormulaPtr closed(int depth) {
    if (pick(2) == 0) {
      const std::string v = "x";
      return Formula::forall(v, "D", tree(depth, &v));
    }
    return tree(depth, nullptr);
  }

  /// Adds top-level Iff with probability 1/3 (kept off inner nodes so value
  /// magnitudes stay moderate for strict generators).
  FormulaPtr closed_with_iff(int depth) {
    FormulaPtr f = closed(depth);
    if (pick(3) == 0) return Formula::iff(std::move(f), closed(depth - 1));
    return f;
  }
};

/// Uniform atom values over every Pred leaf of a graph.
inline std::vector<double> random_atom_values(const LossGraph& g, unsigned seed,
                                              double lo = 0.05, double hi = 0.95) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(g.atoms().size());
  for (double& x : v) x = u(rng);
  return v;
}

/// One shared assignment usable across graphs with different atom orders.
inline std::map<GroundAtom, double> random_assignment(
    std::initializer_list<const LossGraph*> graphs, unsigned seed, double lo = 0.05,
    double hi = 0.95) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::map<GroundAtom, double> m;
  for (const LossGraph* g : graphs)
    for (const GroundAtom& a : g->atoms()) m.emplace(a, u(rng));
  return m;
}

inline std::vector<double> values_for(const LossGraph& g,
                                      const std::map<GroundAtom, double>& m) {
  std::vector<double> v;
  v.reserve(g.atoms().size());
  for (const GroundAtom& a : g.atoms()) v.push_back(m.at(a));
  return v;
}

/// Difference treating equal-signed infinities as identical.
inline double ext_diff(double a, double b) {
  if (std::isinf(a) && std::isinf(b) && (a > 0) == (b > 0)) return 0.0;
  return std::fabs(a - b);
}

}  // namespace tnloss::testutil
