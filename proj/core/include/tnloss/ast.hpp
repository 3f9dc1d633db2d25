#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace tnloss {

/// A term in an atom's argument list: either a variable bound by an
/// enclosing quantifier or a named constant (constants can only be
/// introduced programmatically; the text format requires bound variables).
struct Term {
  enum class Kind { Variable, Constant };
  Kind kind = Kind::Variable;
  std::string name;

  static Term var(std::string n) { return Term{Kind::Variable, std::move(n)}; }
  static Term constant(std::string n) { return Term{Kind::Constant, std::move(n)}; }
  bool operator==(const Term&) const = default;
};

class Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

/// Immutable formula tree. Connective names follow their semantics under an
/// additive generator: Strong* map through the generator, Weak* are min/max,
/// Not is 1-x, ResNeg is the residuum into falsity.
class Formula {
 public:
  enum class Kind {
    Atom,
    Not,
    ResNeg,
    StrongConj,
    StrongDisj,
    WeakConj,
    WeakDisj,
    Implies,
    Iff,
    Forall,
    Exists,
  };

  Kind kind() const noexcept { return kind_; }

  // Atom accessors.
  const std::string& predicate() const { return pred_; }
  const std::vector<Term>& args() const { return args_; }

  // Connective accessors: lhs() is also the operand of unary nodes and the
  // body of quantifiers.
  const FormulaPtr& lhs() const { return lhs_; }
  const FormulaPtr& rhs() const { return rhs_; }

  // Quantifier accessors.
  const std::string& var() const { return var_; }
  const std::string& domain() const { return domain_; }

  static FormulaPtr atom(std::string pred, std::vector<Term> args);
  static FormulaPtr negate(FormulaPtr a);
  static FormulaPtr res_neg(FormulaPtr a);
  static FormulaPtr strong_conj(FormulaPtr a, FormulaPtr b);
  static FormulaPtr strong_disj(FormulaPtr a, FormulaPtr b);
  static FormulaPtr weak_conj(FormulaPtr a, FormulaPtr b);
  static FormulaPtr weak_disj(FormulaPtr a, FormulaPtr b);
  static FormulaPtr implies(FormulaPtr a, FormulaPtr b);
  static FormulaPtr iff(FormulaPtr a, FormulaPtr b);
  static FormulaPtr forall(std::string var, std::string domain, FormulaPtr body);
  static FormulaPtr exists(std::string var, std::string domain, FormulaPtr body);

  bool is_quantifier() const noexcept {
    return kind_ == Kind::Forall || kind_ == Kind::Exists;
  }

 private:
  Formula() = default;
  Kind kind_ = Kind::Atom;
  std::string pred_;
  std::vector<Term> args_;
  FormulaPtr lhs_, rhs_;
  std::string var_, domain_;
};

bool structurally_equal(const Formula& a, const Formula& b);

/// Free (unbound) variable names of a formula.
std::set<std::string> free_vars(const Formula& f);

/// Renders with the same token syntax the parser accepts; parenthesized so
/// that parsing the output reproduces the tree.
std::string pretty_print(const Formula& f);

/// How a predicate is realized at grounding time.
enum class PredicateBinding {
  Learnable,  // output head of a trainable model
  Given,      // fixed truth table from data
};

struct PredicateDecl {
  std::string name;
  int arity = 1;
  PredicateBinding binding = PredicateBinding::Learnable;
};

struct Rule {
  FormulaPtr formula;
  double weight = 1.0;
  std::string label;  // optional, for diagnostics
};

struct DomainDecl {
  std::string name;
  int declared_size = -1;  // optional size hint from the text format
};

struct KnowledgeBase {
  std::vector<DomainDecl> domains;
  std::vector<PredicateDecl> predicates;
  std::vector<Rule> rules;

  const PredicateDecl* find_predicate(const std::string& name) const;
  const DomainDecl* find_domain(const std::string& name) const;
};

}  // namespace tnloss
