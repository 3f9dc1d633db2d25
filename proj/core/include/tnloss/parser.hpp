#pragma once

#include <stdexcept>
#include <string>

#include "tnloss/ast.hpp"

namespace tnloss {

enum class ParseErrorKind {
  Lexical,
  Syntax,
  UnknownPredicate,
  ArityMismatch,
  UnboundVariable,
  DuplicateVariable,
  UnknownDomain,
  Validation,
};

class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorKind kind, int line, int col, const std::string& msg);
  ParseErrorKind kind() const noexcept { return kind_; }
  int line() const noexcept { return line_; }
  int column() const noexcept { return col_; }

 private:
  ParseErrorKind kind_;
  int line_, col_;
};

/// Parses a whole knowledge-base file: domain declarations, predicate
/// declarations, and weighted rules. Throws ParseError on the first problem.
KnowledgeBase parse_kb(const std::string& text);

/// Parses a single formula against an existing KB's declarations
/// (for tests and programmatic use).
FormulaPtr parse_formula(const std::string& text, const KnowledgeBase& kb);

}  // namespace tnloss
