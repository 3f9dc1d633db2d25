#include "tnloss/parser.hpp"

#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <vector>

namespace tnloss {

namespace {

const char* kind_name(ParseErrorKind k) {
  switch (k) {
    case ParseErrorKind::Lexical: return "lexical error";
    case ParseErrorKind::Syntax: return "syntax error";
    case ParseErrorKind::UnknownPredicate: return "unknown predicate";
    case ParseErrorKind::ArityMismatch: return "arity mismatch";
    case ParseErrorKind::UnboundVariable: return "unbound variable";
    case ParseErrorKind::DuplicateVariable: return "duplicate variable";
    case ParseErrorKind::UnknownDomain: return "unknown domain";
    case ParseErrorKind::Validation: return "validation error";
  }
  return "error";
}

struct Token {
  enum class K { Ident, Number, Punct, End };
  K k = K::End;
  std::string text;
  int line = 1, col = 1;
};

const std::set<std::string>& keywords() {
  static const std::set<std::string> kw = {
      "forall", "exists", "in",   "and",    "or",        "not",
      "domain", "pred",   "rule", "weight", "size",      "learnable",
      "given"};
  return kw;
}

class Lexer {
 public:
  explicit Lexer(const std::string& text) : s_(text) { advance(); }

  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(ParseErrorKind::Lexical, line_, col_, msg);
  }

  void advance() {
    skip_ws();
    tok_.line = line_;
    tok_.col = col_;
    if (i_ >= s_.size()) {
      tok_.k = Token::K::End;
      tok_.text.clear();
      return;
    }
    const char c = s_[i_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i_;
      while (j < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_'))
        ++j;
      tok_.k = Token::K::Ident;
      tok_.text = s_.substr(i_, j - i_);
      bump(j - i_);
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '-' && i_ + 1 < s_.size() &&
         std::isdigit(static_cast<unsigned char>(s_[i_ + 1])) && !starts("->"))) {
      size_t j = i_ + 1;
      auto digits = [&] {
        while (j < s_.size() && std::isdigit(static_cast<unsigned char>(s_[j]))) ++j;
      };
      digits();
      if (j < s_.size() && s_[j] == '.') {
        ++j;
        digits();
      }
      if (j < s_.size() && (s_[j] == 'e' || s_[j] == 'E')) {
        ++j;
        if (j < s_.size() && (s_[j] == '+' || s_[j] == '-')) ++j;
        digits();
      }
      tok_.k = Token::K::Number;
      tok_.text = s_.substr(i_, j - i_);
      bump(j - i_);
      return;
    }
    for (const char* p : {"<=>", "=>", "->"}) {
      if (starts(p)) {
        tok_.k = Token::K::Punct;
        tok_.text = p;
        bump(tok_.text.size());
        return;
      }
    }
    if (std::string("(),:;=&|~/").find(c) != std::string::npos) {
      tok_.k = Token::K::Punct;
      tok_.text = std::string(1, c);
      bump(1);
      return;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  bool starts(const char* p) const { return s_.compare(i_, std::string(p).size(), p) == 0; }

  void skip_ws() {
    while (i_ < s_.size()) {
      const char c = s_[i_];
      if (c == '#') {
        while (i_ < s_.size() && s_[i_] != '\n') ++i_;
      } else if (c == '\n') {
        ++i_;
        ++line_;
        col_ = 1;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        bump(1);
      } else {
        break;
      }
    }
  }

  void bump(size_t n) {
    i_ += n;
    col_ += static_cast<int>(n);
  }

  const std::string& s_;
  size_t i_ = 0;
  int line_ = 1, col_ = 1;
  Token tok_;
};

class Parser {
 public:
  Parser(const std::string& text, KnowledgeBase* kb) : lex_(text), kb_(kb) {}

  KnowledgeBase parse_file() {
    while (lex_.peek().k != Token::K::End) {
      const Token t = lex_.peek();
      if (is_kw(t, "domain")) {
        parse_domain();
      } else if (is_kw(t, "pred")) {
        parse_pred();
      } else if (is_kw(t, "rule")) {
        parse_rule();
      } else {
        fail(ParseErrorKind::Syntax, t, "expected 'domain', 'pred' or 'rule'");
      }
    }
    if (kb_->rules.empty())
      throw ParseError(ParseErrorKind::Validation, 1, 1, "knowledge base declares no rules");
    return std::move(*kb_);
  }

  FormulaPtr parse_single_formula() {
    FormulaPtr f = parse_formula();
    if (lex_.peek().k == Token::K::Punct && lex_.peek().text == ";") lex_.take();
    expect_end();
    return f;
  }

 private:
  [[noreturn]] void fail(ParseErrorKind k, const Token& t, const std::string& msg) {
    throw ParseError(k, t.line, t.col, msg);
  }

  static bool is_kw(const Token& t, const char* w) {
    return t.k == Token::K::Ident && t.text == w;
  }

  Token expect_punct(const std::string& p, const char* what) {
    const Token t = lex_.take();
    if (t.k != Token::K::Punct || t.text != p)
      fail(ParseErrorKind::Syntax, t, std::string("expected '") + p + "' " + what +
                                          ", got '" + t.text + "'");
    return t;
  }

  Token expect_ident(const char* what) {
    const Token t = lex_.take();
    if (t.k != Token::K::Ident)
      fail(ParseErrorKind::Syntax, t, std::string("expected ") + what);
    if (keywords().count(t.text))
      fail(ParseErrorKind::Syntax, t, "'" + t.text + "' is a reserved word");
    return t;
  }

  double expect_number(const char* what) {
    const Token t = lex_.take();
    if (t.k != Token::K::Number)
      fail(ParseErrorKind::Syntax, t, std::string("expected number for ") + what);
    return std::stod(t.text);
  }

  void expect_end() {
    const Token t = lex_.peek();
    if (t.k != Token::K::End)
      fail(ParseErrorKind::Syntax, t, "unexpected trailing input '" + t.text + "'");
  }

  void parse_domain() {
    lex_.take();  // 'domain'
    const Token name = expect_ident("domain name");
    if (kb_->find_domain(name.text))
      fail(ParseErrorKind::Validation, name, "domain '" + name.text + "' redeclared");
    DomainDecl d{name.text, -1};
    if (is_kw(lex_.peek(), "size")) {
      lex_.take();
      expect_punct("=", "after 'size'");
      const double n = expect_number("domain size");
      if (n < 1 || n != static_cast<int>(n))
        fail(ParseErrorKind::Validation, name, "domain size must be a positive integer");
      d.declared_size = static_cast<int>(n);
    }
    expect_punct(";", "after domain declaration");
    kb_->domains.push_back(std::move(d));
  }

  void parse_pred() {
    lex_.take();  // 'pred'
    const Token name = expect_ident("predicate name");
    if (kb_->find_predicate(name.text))
      fail(ParseErrorKind::Validation, name, "predicate '" + name.text + "' redeclared");
    expect_punct("/", "after predicate name");
    const double ar = expect_number("arity");
    if (ar < 1 || ar != static_cast<int>(ar))
      fail(ParseErrorKind::Validation, name, "arity must be a positive integer");
    const Token b = lex_.take();
    PredicateBinding binding;
    if (is_kw(b, "learnable"))
      binding = PredicateBinding::Learnable;
    else if (is_kw(b, "given"))
      binding = PredicateBinding::Given;
    else
      fail(ParseErrorKind::Syntax, b, "expected 'learnable' or 'given'");
    expect_punct(";", "after predicate declaration");
    kb_->predicates.push_back(PredicateDecl{name.text, static_cast<int>(ar), binding});
  }

  void parse_rule() {
    const Token at = lex_.take();  // 'rule'
    double weight = 1.0;
    if (is_kw(lex_.peek(), "weight")) {
      lex_.take();
      expect_punct("=", "after 'weight'");
      weight = expect_number("rule weight");
      if (!(weight >= 0.0))
        fail(ParseErrorKind::Validation, at, "rule weight must be nonnegative");
    }
    FormulaPtr f = parse_formula();
    expect_punct(";", "after rule formula");
    kb_->rules.push_back(Rule{std::move(f), weight, ""});
  }

  // --- formulas, loosest binding first ---

  FormulaPtr parse_formula() { return parse_iff(); }

  FormulaPtr parse_iff() {
    FormulaPtr f = parse_impl();
    while (lex_.peek().k == Token::K::Punct && lex_.peek().text == "<=>") {
      lex_.take();
      f = Formula::iff(std::move(f), parse_impl());
    }
    return f;
  }

  FormulaPtr parse_impl() {
    FormulaPtr f = parse_weak_or();
    const Token& t = lex_.peek();
    if (t.k == Token::K::Punct && (t.text == "=>" || t.text == "->")) {
      const bool material = t.text == "->";
      lex_.take();
      FormulaPtr rhs = parse_impl();  // right associative
      if (material)
        return Formula::strong_disj(Formula::negate(std::move(f)), std::move(rhs));
      return Formula::implies(std::move(f), std::move(rhs));
    }
    return f;
  }

  FormulaPtr parse_weak_or() {
    FormulaPtr f = parse_weak_and();
    while (is_kw(lex_.peek(), "or")) {
      lex_.take();
      f = Formula::weak_disj(std::move(f), parse_weak_and());
    }
    return f;
  }

  FormulaPtr parse_weak_and() {
    FormulaPtr f = parse_strong_or();
    while (is_kw(lex_.peek(), "and")) {
      lex_.take();
      f = Formula::weak_conj(std::move(f), parse_strong_or());
    }
    return f;
  }

  FormulaPtr parse_strong_or() {
    FormulaPtr f = parse_strong_and();
    while (lex_.peek().k == Token::K::Punct && lex_.peek().text == "|") {
      lex_.take();
      f = Formula::strong_disj(std::move(f), parse_strong_and());
    }
    return f;
  }

  FormulaPtr parse_strong_and() {
    FormulaPtr f = parse_unary();
    while (lex_.peek().k == Token::K::Punct && lex_.peek().text == "&") {
      lex_.take();
      f = Formula::strong_conj(std::move(f), parse_unary());
    }
    return f;
  }

  FormulaPtr parse_unary() {
    const Token& t = lex_.peek();
    if (is_kw(t, "not")) {
      lex_.take();
      return Formula::negate(parse_unary());
    }
    if (t.k == Token::K::Punct && t.text == "~") {
      lex_.take();
      return Formula::res_neg(parse_unary());
    }
    return parse_primary();
  }

  FormulaPtr parse_primary() {
    const Token t = lex_.peek();
    if (t.k == Token::K::Punct && t.text == "(") {
      lex_.take();
      FormulaPtr f = parse_formula();
      expect_punct(")", "to close group");
      return f;
    }
    if (is_kw(t, "forall") || is_kw(t, "exists")) return parse_quantifier();
    if (t.k == Token::K::Ident && !keywords().count(t.text)) return parse_atom();
    fail(ParseErrorKind::Syntax, t, "expected a formula, got '" + t.text + "'");
  }

  FormulaPtr parse_quantifier() {
    const Token q = lex_.take();
    const bool is_forall = q.text == "forall";
    std::vector<Token> vars;
    vars.push_back(expect_ident("quantified variable"));
    while (lex_.peek().k == Token::K::Punct && lex_.peek().text == ",") {
      lex_.take();
      vars.push_back(expect_ident("quantified variable"));
    }
    std::string domain;
    if (is_kw(lex_.peek(), "in")) {
      lex_.take();
      const Token d = expect_ident("domain name");
      if (!kb_->find_domain(d.text))
        fail(ParseErrorKind::UnknownDomain, d, "unknown domain '" + d.text + "'");
      domain = d.text;
    } else if (kb_->domains.size() == 1) {
      domain = kb_->domains[0].name;
    } else {
      fail(ParseErrorKind::UnknownDomain, q,
           "no 'in <domain>' given and the KB does not declare exactly one domain");
    }
    expect_punct(":", "after quantifier");
    for (const Token& v : vars) {
      if (scope_.count(v.text))
        fail(ParseErrorKind::DuplicateVariable, v,
             "variable '" + v.text + "' already bound on this path");
      scope_.insert(v.text);
    }
    FormulaPtr body = parse_formula();
    for (auto it = vars.rbegin(); it != vars.rend(); ++it) {
      scope_.erase(it->text);
      body = is_forall ? Formula::forall(it->text, domain, std::move(body))
                       : Formula::exists(it->text, domain, std::move(body));
    }
    return body;
  }

  FormulaPtr parse_atom() {
    const Token name = expect_ident("predicate name");
    const PredicateDecl* decl = kb_->find_predicate(name.text);
    if (!decl)
      fail(ParseErrorKind::UnknownPredicate, name, "unknown predicate '" + name.text + "'");
    expect_punct("(", "after predicate name");
    std::vector<Term> args;
    while (true) {
      const Token a = expect_ident("argument variable");
      if (!scope_.count(a.text))
        fail(ParseErrorKind::UnboundVariable, a,
             "variable '" + a.text + "' is not bound by a quantifier");
      args.push_back(Term::var(a.text));
      const Token sep = lex_.take();
      if (sep.k == Token::K::Punct && sep.text == ",") continue;
      if (sep.k == Token::K::Punct && sep.text == ")") break;
      fail(ParseErrorKind::Syntax, sep, "expected ',' or ')' in argument list");
    }
    if (static_cast<int>(args.size()) != decl->arity)
      fail(ParseErrorKind::ArityMismatch, name,
           "predicate '" + name.text + "' has arity " + std::to_string(decl->arity) +
               " but got " + std::to_string(args.size()) + " arguments");
    return Formula::atom(name.text, std::move(args));
  }

  Lexer lex_;
  KnowledgeBase* kb_;
  std::set<std::string> scope_;
};

}  // namespace

ParseError::ParseError(ParseErrorKind kind, int line, int col, const std::string& msg)
    : std::runtime_error(std::string(kind_name(kind)) + " at " + std::to_string(line) +
                         ":" + std::to_string(col) + ": " + msg),
      kind_(kind),
      line_(line),
      col_(col) {}

KnowledgeBase parse_kb(const std::string& text) {
  KnowledgeBase kb;
  Parser p(text, &kb);
  return p.parse_file();
}

FormulaPtr parse_formula(const std::string& text, const KnowledgeBase& kb) {
  KnowledgeBase scratch = kb;  // parser validates against declarations only
  Parser p(text, &scratch);
  return p.parse_single_formula();
}

}  // namespace tnloss
