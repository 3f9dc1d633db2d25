#include "tnloss/ast.hpp"

#include <sstream>

namespace tnloss {

// Formula's constructor is private; these builders are the only way to make
// nodes, which keeps every FormulaPtr immutable after creation.

FormulaPtr Formula::atom(std::string pred, std::vector<Term> args) {
  auto f = std::shared_ptr<Formula>(new Formula());
  f->kind_ = Kind::Atom;
  f->pred_ = std::move(pred);
  f->args_ = std::move(args);
  return f;
}

FormulaPtr Formula::negate(FormulaPtr a) {
  auto f = std::shared_ptr<Formula>(new Formula());
  f->kind_ = Kind::Not;
  f->lhs_ = std::move(a);
  return f;
}

FormulaPtr Formula::res_neg(FormulaPtr a) {
  auto f = std::shared_ptr<Formula>(new Formula());
  f->kind_ = Kind::ResNeg;
  f->lhs_ = std::move(a);
  return f;
}

#define TNLOSS_BINARY_BUILDER(fn, K)                          \
  FormulaPtr Formula::fn(FormulaPtr a, FormulaPtr b) {        \
    auto f = std::shared_ptr<Formula>(new Formula());         \
    f->kind_ = Kind::K;                                       \
    f->lhs_ = std::move(a);                                   \
    f->rhs_ = std::move(b);                                   \
    return f;                                                 \
  }

TNLOSS_BINARY_BUILDER(strong_conj, StrongConj)
TNLOSS_BINARY_BUILDER(strong_disj, StrongDisj)
TNLOSS_BINARY_BUILDER(weak_conj, WeakConj)
TNLOSS_BINARY_BUILDER(weak_disj, WeakDisj)
TNLOSS_BINARY_BUILDER(implies, Implies)
TNLOSS_BINARY_BUILDER(iff, Iff)
#undef TNLOSS_BINARY_BUILDER

FormulaPtr Formula::forall(std::string var, std::string domain, FormulaPtr body) {
  auto f = std::shared_ptr<Formula>(new Formula());
  f->kind_ = Kind::Forall;
  f->var_ = std::move(var);
  f->domain_ = std::move(domain);
  f->lhs_ = std::move(body);
  return f;
}

FormulaPtr Formula::exists(std::string var, std::string domain, FormulaPtr body) {
  auto f = std::shared_ptr<Formula>(new Formula());
  f->kind_ = Kind::Exists;
  f->var_ = std::move(var);
  f->domain_ = std::move(domain);
  f->lhs_ = std::move(body);
  return f;
}

bool structurally_equal(const Formula& a, const Formula& b) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Formula::Kind::Atom:
      return a.predicate() == b.predicate() && a.args() == b.args();
    case Formula::Kind::Not:
    case Formula::Kind::ResNeg:
      return structurally_equal(*a.lhs(), *b.lhs());
    case Formula::Kind::Forall:
    case Formula::Kind::Exists:
      return a.var() == b.var() && a.domain() == b.domain() &&
             structurally_equal(*a.lhs(), *b.lhs());
    default:
      return structurally_equal(*a.lhs(), *b.lhs()) &&
             structurally_equal(*a.rhs(), *b.rhs());
  }
}

namespace {

void collect_free(const Formula& f, std::set<std::string>& bound,
                  std::set<std::string>& out) {
  switch (f.kind()) {
    case Formula::Kind::Atom:
      for (const Term& t : f.args())
        if (t.kind == Term::Kind::Variable && !bound.count(t.name)) out.insert(t.name);
      return;
    case Formula::Kind::Forall:
    case Formula::Kind::Exists: {
      const bool already = bound.count(f.var()) > 0;
      bound.insert(f.var());
      collect_free(*f.lhs(), bound, out);
      if (!already) bound.erase(f.var());
      return;
    }
    default:
      collect_free(*f.lhs(), bound, out);
      if (f.rhs()) collect_free(*f.rhs(), bound, out);
  }
}

// Binding strength, loosest first; operands at a lower level get parens.
int level_of(Formula::Kind k) {
  switch (k) {
    case Formula::Kind::Iff: return 1;
    case Formula::Kind::Implies: return 2;
    case Formula::Kind::WeakDisj: return 3;
    case Formula::Kind::WeakConj: return 4;
    case Formula::Kind::StrongDisj: return 5;
    case Formula::Kind::StrongConj: return 6;
    case Formula::Kind::Not:
    case Formula::Kind::ResNeg: return 7;
    default: return 8;  // atoms; quantifiers are parenthesized as operands
  }
}

const char* infix_token(Formula::Kind k) {
  switch (k) {
    case Formula::Kind::Iff: return "<=>";
    case Formula::Kind::Implies: return "=>";
    case Formula::Kind::WeakDisj: return "or";
    case Formula::Kind::WeakConj: return "and";
    case Formula::Kind::StrongDisj: return "|";
    case Formula::Kind::StrongConj: return "&";
    default: return "?";
  }
}

void print(const Formula& f, int min_level, std::ostream& os) {
  switch (f.kind()) {
    case Formula::Kind::Atom: {
      os << f.predicate() << '(';
      bool first = true;
      for (const Term& t : f.args()) {
        if (!first) os << ", ";
        first = false;
        os << t.name;
      }
      os << ')';
      return;
    }
    case Formula::Kind::Not:
    case Formula::Kind::ResNeg: {
      const bool parens = min_level > 7;
      if (parens) os << '(';
      os << (f.kind() == Formula::Kind::Not ? "not " : "~");
      print(*f.lhs(), 8, os);
      if (parens) os << ')';
      return;
    }
    case Formula::Kind::Forall:
    case Formula::Kind::Exists: {
      const bool parens = min_level > 0;
      if (parens) os << '(';
      os << (f.kind() == Formula::Kind::Forall ? "forall " : "exists ");
      os << f.var() << " in " << f.domain() << ": ";
      print(*f.lhs(), 0, os);
      if (parens) os << ')';
      return;
    }
    default: {
      const int lv = level_of(f.kind());
      const bool parens = min_level > lv;
      const bool right_assoc = f.kind() == Formula::Kind::Implies;
      if (parens) os << '(';
      print(*f.lhs(), right_assoc ? lv + 1 : lv, os);
      os << ' ' << infix_token(f.kind()) << ' ';
      print(*f.rhs(), right_assoc ? lv : lv + 1, os);
      if (parens) os << ')';
    }
  }
}

}  // namespace

std::set<std::string> free_vars(const Formula& f) {
  std::set<std::string> bound, out;
  collect_free(f, bound, out);
  return out;
}

std::string pretty_print(const Formula& f) {
  std::ostringstream os;
  print(f, 0, os);
  return os.str();
}

const PredicateDecl* KnowledgeBase::find_predicate(const std::string& name) const {
  for (const auto& p : predicates)
    if (p.name == name) return &p;
  return nullptr;
}

const DomainDecl* KnowledgeBase::find_domain(const std::string& name) const {
  for (const auto& d : domains)
    if (d.name == name) return &d;
  return nullptr;
}

}  // namespace tnloss
