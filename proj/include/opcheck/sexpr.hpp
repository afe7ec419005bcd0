#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace opcheck {

/// Minimal s-expression tree for reading solver output.
struct SExpr {
  bool is_atom = true;
  std::string atom;  // symbol, numeral, or string literal including quotes
  std::vector<SExpr> list;

  bool is(std::string_view a) const { return is_atom && atom == a; }
  std::string str() const;
};

struct SExprError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parses every top-level s-expression in `text`.
std::vector<SExpr> parse_sexprs(std::string_view text);

}  // namespace opcheck
