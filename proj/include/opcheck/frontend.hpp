#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "opcheck/ast.hpp"
#include "opcheck/formula.hpp"

namespace opcheck {

/// Lexical or syntax error with a 1-based source position.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, SourcePos pos);
  SourcePos pos() const { return pos_; }
  const std::string& message() const { return message_; }

 private:
  std::string message_;
  SourcePos pos_;
};

Library parse_library(std::string_view source);

/// Parses a standalone formula in annotation syntax.
FormulaPtr parse_formula(std::string_view source);

/// Parses a standalone program expression.
ExprPtr parse_expr(std::string_view source);

struct Diagnostic {
  std::string code;  // e.g. "assignment-to-formal"
  std::string message;
  SourcePos pos;
};

std::string to_string(const Diagnostic& d);

/// Checks the well-formedness rules of parsed libraries. An empty result
/// means the library is accepted.
std::vector<Diagnostic> validate(const Library& lib);

/// Checks an invariant candidate against the scope rules: free variables
/// must be globals and applied symbols must be procedures of the right
/// arity.
std::vector<Diagnostic> check_invariant_scope(const Library& lib, const FormulaPtr& inv,
                                              SourcePos pos = {});

std::string pretty_print(const Library& lib);

/// Prints a statement (including transformed-body forms) with the given
/// indentation, one statement per line.
std::string print_stmt(const StmtPtr& s, int indent = 0);

}  // namespace opcheck
