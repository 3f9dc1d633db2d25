#include "tnloss/compile.hpp"

#include <cmath>
#include <random>
#include <set>

#include "tnloss/tape.hpp"

namespace tnloss {

namespace {

/// Shared machinery for both compilation modes. loss(f) builds g applied to
/// f's truth with generator/pseudo-inverse pairs cancelled wherever the
/// connective permits; truth(f) builds f's truth value, reusing loss(f)
/// under a single pseudo-inverse for the generator-shaped connectives.
class Compiler {
 public:
  Compiler(const Generator& g, const GroundingContext& ctx, const KnowledgeBase& kb,
           const CompileOptions& opts)
      : graph_(g, opts.atom_epsilon), ctx_(&ctx), kb_(&kb), opts_(opts) {}

  LossGraph finish(int out) {
    graph_.set_output(out);
    return std::move(graph_);
  }

  const Generator& gen() const { return graph_.generator(); }
  bool nilpotent() const { return gen().kind() == TNormKind::Nilpotent; }

  // ----- constant folding over graph emission -----

  bool is_const(int id) const { return graph_.nodes()[static_cast<size_t>(id)].op == OpKind::Const; }
  double cval(int id) const { return graph_.nodes()[static_cast<size_t>(id)].value; }

  int c_const(double v) { return graph_.emit_const(v); }

  int c_add(int a, int b) {
    if (is_const(a) && is_const(b)) return c_const(cval(a) + cval(b));
    return graph_.emit_add(a, b);
  }
  int c_sub(int a, int b) {
    if (is_const(a) && is_const(b)) return c_const(cval(a) - cval(b));
    return graph_.emit_sub(a, b);
  }
  int c_mul(int a, int b) {
    if (is_const(a) && is_const(b)) return c_const(cval(a) * cval(b));
    return graph_.emit_mul(a, b);
  }
  int c_min(int a, int b) {
    if (is_const(a) && is_const(b)) return c_const(std::min(cval(a), cval(b)));
    return graph_.emit_min(a, b);
  }
  int c_max(int a, int b) {
    if (is_const(a) && is_const(b)) return c_const(std::max(cval(a), cval(b)));
    return graph_.emit_max(a, b);
  }
  int c_abs(int a) {
    if (is_const(a)) return c_const(std::fabs(cval(a)));
    return graph_.emit_abs(a);
  }
  int c_clamp(int a) {
    if (is_const(a)) return c_const(cval(a) > 0.0 ? cval(a) : 0.0);
    return graph_.emit_clamp_min0(a);
  }
  int c_geneval(int a) {
    if (is_const(a)) {
      const double x = cval(a);
      double v;
      if (x <= 0.0)
        v = gen().zero_limit();
      else if (x < opts_.atom_epsilon)
        v = gen().eval(opts_.atom_epsilon);
      else if (x >= 1.0)
        v = 0.0;
      else
        v = gen().eval(x);
      return c_const(v);
    }
    return graph_.emit_gen_eval(a);
  }
  int c_genpinv(int a) {
    if (is_const(a)) return c_const(cval(a) <= 0.0 ? 1.0 : gen().pseudo_inverse(cval(a)));
    return graph_.emit_gen_pinv(a);
  }
  int c_sum(std::vector<int32_t> args) {
    bool all_const = true;
    for (int32_t a : args)
      if (!is_const(a)) {
        all_const = false;
        break;
      }
    if (all_const) {
      double acc = 0.0;
      for (int32_t a : args) acc += cval(a);
      return c_const(acc);
    }
    return graph_.emit_sum(std::move(args));
  }

  /// min{g(0+), x} for nilpotent generators; the identity for strict ones,
  /// whose zero limit is infinite.
  int min_zl(int a) {
    if (!nilpotent()) return a;
    return c_min(c_const(gen().zero_limit()), a);
  }

  // ----- grounding -----

  int atom_truth(const Formula& f) {
    const PredicateDecl* decl = kb_->find_predicate(f.predicate());
    if (!decl) throw CompileError("predicate '" + f.predicate() + "' is not declared");
    GroundAtom ga;
    ga.predicate = f.predicate();
    for (const Term& t : f.args()) {
      if (t.kind == Term::Kind::Variable) {
        auto it = binding_.find(t.name);
        if (it == binding_.end())
          throw CompileError("variable '" + t.name + "' is unbound (formula not closed)");
        ga.individuals.push_back(it->second);
      } else {
        ga.individuals.push_back(t.name);
      }
    }
    if (static_cast<int>(ga.individuals.size()) != decl->arity)
      throw CompileError("atom of '" + f.predicate() + "' has wrong arity");
    if (decl->binding == PredicateBinding::Given) {
      auto it = ctx_->given.find(f.predicate());
      if (it == ctx_->given.end())
        throw CompileError("no truth table provided for given predicate '" + f.predicate() + "'");
      return c_const(it->second.lookup(ga.individuals));
    }
    return graph_.emit_pred(ga);
  }

  // ----- truth compilation -----

  // Subtrees are always emitted into locals, left before right: the argument
  // evaluation order of a call is implementation-defined and must not decide
  // node numbering, or listings would differ between compilers.
  int truth(const Formula& f) {
    switch (f.kind()) {
      case Formula::Kind::Atom: return atom_truth(f);
      case Formula::Kind::Not: {
        const int one = c_const(1.0);
        const int t = truth(*f.lhs());
        return c_sub(one, t);
      }
      case Formula::Kind::WeakConj: {
        const int ta = truth(*f.lhs());
        const int tb = truth(*f.rhs());
        return c_min(ta, tb);
      }
      case Formula::Kind::WeakDisj: {
        const int ta = truth(*f.lhs());
        const int tb = truth(*f.rhs());
        return c_max(ta, tb);
      }
      case Formula::Kind::StrongDisj: {
        // x (+) y = 1 - pinv(min{g(0+), g(1-x) + g(1-y)})
        const int ta = truth(*f.lhs());
        const int tb = truth(*f.rhs());
        if (is_const(ta) && is_const(tb))
          return c_const(
              tconorm(gen(), TruthValue(cval(ta)), TruthValue(cval(tb))).value());
        const int one = c_const(1.0);
        const int ga = c_geneval(c_sub(one, ta));
        const int gb = c_geneval(c_sub(one, tb));
        const int s = c_add(ga, gb);
        return c_sub(one, c_genpinv(min_zl(s)));
      }
      case Formula::Kind::Exists:
        if (opts_.quantifier_mode == QuantifierMode::Generated &&
            opts_.exists_mode == ExistsMode::TConorm)
          return exists_tconorm_truth(f);
        [[fallthrough]];
      default:
        // Every remaining connective compiles its loss as min{g(0+), .}-bounded
        // generator output, so one pseudo-inverse recovers the truth exactly.
        return c_genpinv(loss(f));
    }
  }

  int exists_tconorm_truth(const Formula& f) {
    // 1 - pinv(min{g(0+), sum_x g(1 - body(x))}), the n-ary dual of the
    // generated t-conorm.
    const auto& ids = domain_individuals(f.domain());
    if (ids.empty()) throw CompileError("empty quantifier domain '" + f.domain() + "'");
    std::vector<int32_t> terms;
    terms.reserve(ids.size());
    const int one = c_const(1.0);
    for (const std::string& ind : ids) {
      bind(f.var(), ind);
      terms.push_back(c_geneval(c_sub(one, truth(*f.lhs()))));
      unbind(f.var());
    }
    return c_sub(one, c_genpinv(min_zl(c_sum(std::move(terms)))));
  }

  // ----- loss compilation (g applied to truth, simplified) -----

  int loss(const Formula& f) {
    switch (f.kind()) {
      case Formula::Kind::Atom: return c_geneval(atom_truth(f));
      case Formula::Kind::WeakConj: {
        const int la = loss(*f.lhs());
        const int lb = loss(*f.rhs());
        return c_max(la, lb);
      }
      case Formula::Kind::WeakDisj: {
        const int la = loss(*f.lhs());
        const int lb = loss(*f.rhs());
        return c_min(la, lb);
      }
      case Formula::Kind::StrongConj: {
        const int la = loss(*f.lhs());
        const int lb = loss(*f.rhs());
        return min_zl(c_add(la, lb));
      }
      case Formula::Kind::Implies: {
        const int la = loss(*f.lhs());
        const int lb = loss(*f.rhs());
        if (is_const(la) && is_const(lb)) return fold_loss2(Formula::Kind::Implies, la, lb);
        return c_clamp(c_sub(lb, la));
      }
      case Formula::Kind::Iff: {
        const int la = loss(*f.lhs());
        const int lb = loss(*f.rhs());
        if (is_const(la) && is_const(lb)) return fold_loss2(Formula::Kind::Iff, la, lb);
        return c_abs(c_sub(la, lb));
      }
      case Formula::Kind::ResNeg: {
        const int la = loss(*f.lhs());
        if (is_const(la)) {
          const TruthValue t(gen().pseudo_inverse(std::max(0.0, cval(la))));
          return c_geneval(c_const(residual_neg(gen(), t).value()));
        }
        return c_clamp(c_sub(c_const(gen().zero_limit()), la));
      }
      case Formula::Kind::Not:
      case Formula::Kind::StrongDisj:
        // No simplification exists for these: fall back to g(truth) at this
        // node only, keeping the rest of the tree simplified.
        return c_geneval(truth(f));
      case Formula::Kind::Forall:
        if (opts_.quantifier_mode == QuantifierMode::MinMax) return minmax_forall_loss(f);
        return forall_loss(f);
      case Formula::Kind::Exists:
        if (opts_.quantifier_mode == QuantifierMode::Generated &&
            opts_.exists_mode == ExistsMode::TConorm)
          return c_geneval(truth(f));
        return minmax_exists_loss(f);
    }
    throw CompileError("unhandled connective");
  }

  int fold_loss2(Formula::Kind k, int la, int lb) {
    const TruthValue a(gen().pseudo_inverse(std::max(0.0, cval(la))));
    const TruthValue b(gen().pseudo_inverse(std::max(0.0, cval(lb))));
    const TruthValue t = k == Formula::Kind::Implies ? residuum(gen(), a, b)
                                                     : biresiduum(gen(), a, b);
    return c_geneval(c_const(t.value()));
  }

  // A universally quantified chain aggregates with the generated t-norm:
  // g-space terms add up, truncated once at g(0+) for nilpotent generators.
  int forall_loss(const Formula& f) {
    std::vector<std::pair<std::string, std::string>> chain;  // (var, domain)
    const Formula* body = &f;
    while (body->kind() == Formula::Kind::Forall) {
      chain.emplace_back(body->var(), body->domain());
      body = body->lhs().get();
    }
    std::vector<int32_t> terms;
    if (opts_.prune_guarded && try_pruned_terms(chain, *body, terms))
      return min_zl(c_sum(std::move(terms)));
    enumerate(chain, 0, *body, [&](const Formula& b) { terms.push_back(loss(b)); });
    return min_zl(c_sum(std::move(terms)));
  }

  int minmax_forall_loss(const Formula& f) {
    // g is decreasing, so g(min over x) = max over x of g. No guard pruning
    // here: this mode is for small fixtures and the full product keeps the
    // compiled form in plain correspondence with the min over truths.
    std::vector<std::pair<std::string, std::string>> chain{{f.var(), f.domain()}};
    std::vector<int32_t> terms;
    enumerate(chain, 0, *f.lhs(), [&](const Formula& b) { terms.push_back(loss(b)); });
    if (terms.empty()) throw CompileError("empty quantifier domain '" + f.domain() + "'");
    int acc = terms[0];
    for (size_t i = 1; i < terms.size(); ++i) acc = c_max(acc, terms[i]);
    return acc;
  }

  int minmax_exists_loss(const Formula& f) {
    // g(max over x) = min over x of g.
    std::vector<std::pair<std::string, std::string>> chain{{f.var(), f.domain()}};
    std::vector<int32_t> terms;
    enumerate(chain, 0, *f.lhs(), [&](const Formula& b) { terms.push_back(loss(b)); });
    if (terms.empty()) throw CompileError("empty quantifier domain '" + f.domain() + "'");
    int acc = terms[0];
    for (size_t i = 1; i < terms.size(); ++i) acc = c_min(acc, terms[i]);
    return acc;
  }

  // ----- helpers -----

  const std::vector<std::string>& domain_individuals(const std::string& name) {
    auto it = ctx_->domains.find(name);
    if (it == ctx_->domains.end())
      throw CompileError("no individuals for domain '" + name + "'");
    return it->second;
  }

  void bind(const std::string& var, const std::string& ind) { binding_[var] = ind; }
  void unbind(const std::string& var) { binding_.erase(var); }

  template <typename Fn>
  void enumerate(const std::vector<std::pair<std::string, std::string>>& chain,
                 size_t depth, const Formula& body, const Fn& fn) {
    if (depth == chain.size()) {
      fn(body);
      return;
    }
    const auto& ids = domain_individuals(chain[depth].second);
    if (ids.empty())
      throw CompileError("empty quantifier domain '" + chain[depth].second + "'");
    for (const std::string& ind : ids) {
      bind(chain[depth].first, ind);
      enumerate(chain, depth + 1, body, fn);
      unbind(chain[depth].first);
    }
  }

  /// Guarded-implication pruning: forall x1..xk: G(xs) => C with G a given
  /// predicate whose argument list is exactly the chain variables (each
  /// once) visits only G's support instead of the full product space.
  /// Exact because off-support groundings satisfy the implication with
  /// truth exactly 1 and so add exactly 0 to the g-space sum.
  bool try_pruned_terms(const std::vector<std::pair<std::string, std::string>>& chain,
                        const Formula& body, std::vector<int32_t>& terms) {
    if (body.kind() != Formula::Kind::Implies) return false;
    const Formula& guard = *body.lhs();
    if (guard.kind() != Formula::Kind::Atom) return false;
    const PredicateDecl* decl = kb_->find_predicate(guard.predicate());
    if (!decl || decl->binding != PredicateBinding::Given) return false;
    std::set<std::string> chain_vars;
    for (const auto& [v, d] : chain) chain_vars.insert(v);
    std::set<std::string> guard_vars;
    for (const Term& t : guard.args()) {
      if (t.kind != Term::Kind::Variable) return false;
      if (!guard_vars.insert(t.name).second) return false;  // repeated variable
    }
    if (guard_vars != chain_vars) return false;

    auto table_it = ctx_->given.find(guard.predicate());
    if (table_it == ctx_->given.end())
      throw CompileError("no truth table provided for given predicate '" +
                         guard.predicate() + "'");
    std::map<std::string, const std::string*> var_domain;
    for (const auto& [v, d] : chain) var_domain[v] = &d;
    // Membership sets, one per distinct domain symbol in the chain.
    std::map<std::string, std::set<std::string>> members;
    for (const auto& [v, d] : chain)
      if (!members.count(d)) {
        const auto& ids = domain_individuals(d);
        members[d] = std::set<std::string>(ids.begin(), ids.end());
      }

    for (const auto& [tuple, gval] : table_it->second.values) {
      if (gval == 0.0) continue;
      if (tuple.size() != guard.args().size())
        throw CompileError("tuple arity mismatch in table for '" + guard.predicate() + "'");
      for (size_t k = 0; k < tuple.size(); ++k) {
        const std::string& dom = *var_domain.at(guard.args()[k].name);
        if (!members.at(dom).count(tuple[k]))
          throw CompileError("individual '" + tuple[k] + "' in table for '" +
                             guard.predicate() + "' is outside domain '" + dom + "'");
      }
      for (size_t k = 0; k < tuple.size(); ++k) bind(guard.args()[k].name, tuple[k]);
      const int lc = loss(*body.rhs());
      const double ga = gen().eval(gval);  // guard's g-value; 0 when gval == 1
      terms.push_back(ga == 0.0 ? lc : c_clamp(c_sub(lc, c_const(ga))));
      for (size_t k = 0; k < tuple.size(); ++k) unbind(guard.args()[k].name);
    }
    return true;
  }

 private:
  LossGraph graph_;
  const GroundingContext* ctx_;
  const KnowledgeBase* kb_;
  CompileOptions opts_;
  std::map<std::string, std::string> binding_;
};

void require_closed(const Formula& f) {
  const auto fv = free_vars(f);
  if (!fv.empty())
    throw CompileError("formula is not closed; free variable '" + *fv.begin() + "'");
}

}  // namespace

LossGraph compile_truth(const Formula& f, const Generator& g, const GroundingContext& ctx,
                        const KnowledgeBase& kb, const CompileOptions& opts) {
  require_closed(f);
  Compiler c(g, ctx, kb, opts);
  return c.finish(c.truth(f));
}

LossGraph compile_loss(const Formula& f, const Generator& g, const GroundingContext& ctx,
                       const KnowledgeBase& kb, const CompileOptions& opts) {
  require_closed(f);
  Compiler c(g, ctx, kb, opts);
  return c.finish(c.loss(f));
}

LossGraph kb_loss(const KnowledgeBase& kb, const Generator& g, const GroundingContext& ctx,
                  const CompileOptions& opts) {
  if (kb.rules.empty()) throw CompileError("knowledge base has no rules");
  Compiler c(g, ctx, kb, opts);
  std::vector<int32_t> weighted;
  weighted.reserve(kb.rules.size());
  for (const Rule& r : kb.rules) {
    require_closed(*r.formula);
    const int l = c.loss(*r.formula);
    weighted.push_back(r.weight == 1.0 ? l : c.c_mul(c.c_const(r.weight), l));
  }
  return c.finish(c.c_sum(std::move(weighted)));
}

bool has_simplification_property(const Formula& f, const CompileOptions& opts) {
  switch (f.kind()) {
    case Formula::Kind::Atom: return true;
    case Formula::Kind::Not:
    case Formula::Kind::StrongDisj: return false;
    case Formula::Kind::ResNeg: return has_simplification_property(*f.lhs(), opts);
    case Formula::Kind::Forall: return has_simplification_property(*f.lhs(), opts);
    case Formula::Kind::Exists:
      if (opts.quantifier_mode == QuantifierMode::Generated &&
          opts.exists_mode == ExistsMode::TConorm)
        return false;
      return has_simplification_property(*f.lhs(), opts);
    default:
      return has_simplification_property(*f.lhs(), opts) &&
             has_simplification_property(*f.rhs(), opts);
  }
}

SimplificationReport verify_simplification(const Formula& f, const Generator& g,
                                           const GroundingContext& ctx,
                                           const KnowledgeBase& kb,
                                           const CompileOptions& opts, int samples,
                                           unsigned seed) {
  SimplificationReport rep;
  LossGraph simplified = compile_loss(f, g, ctx, kb, opts);
  // Reference: the generator applied on top of the truth compilation, with
  // no cancellation at the root.
  LossGraph naive = [&] {
    Compiler c(g, ctx, kb, opts);
    return c.finish(c.c_geneval(c.truth(f)));
  }();

  rep.simplified_gen_eval = simplified.count_ops(OpKind::GenEval);
  rep.simplified_gen_pinv = simplified.count_ops(OpKind::GenPinv);
  rep.naive_gen_eval = naive.count_ops(OpKind::GenEval);
  rep.naive_gen_pinv = naive.count_ops(OpKind::GenPinv);
  rep.simplified_nodes = static_cast<int>(simplified.nodes().size());
  rep.naive_nodes = static_cast<int>(naive.nodes().size());

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.05, 0.95);
  Tape ts(simplified), tn(naive);
  for (int s = 0; s < samples; ++s) {
    std::map<GroundAtom, double> vals;
    for (const GroundAtom& a : simplified.atoms()) vals.emplace(a, unit(rng));
    for (const GroundAtom& a : naive.atoms()) vals.emplace(a, unit(rng));
    std::vector<double> vs, vn;
    for (const GroundAtom& a : simplified.atoms()) vs.push_back(vals.at(a));
    for (const GroundAtom& a : naive.atoms()) vn.push_back(vals.at(a));
    const double ls = ts.forward(vs);
    const double ln = tn.forward(vn);
    double diff;
    if (std::isinf(ls) && std::isinf(ln) && (ls > 0) == (ln > 0))
      diff = 0.0;  // both at the same infinite limit
    else
      diff = std::fabs(ls - ln);
    rep.max_value_diff = std::max(rep.max_value_diff, diff);
    ++rep.samples;
  }
  return rep;
}

}  // namespace tnloss
