#pragma once

#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "opcheck/ast.hpp"

namespace opcheck {

enum class Sort { Int, Array1, Array2 };

Sort sort_of(VarKind k);
int sort_rank(Sort s);

struct BoundVar {
  std::string name;
  Sort sort = Sort::Int;

  bool operator==(const BoundVar&) const = default;
};

enum class FormulaKind { True, False, Atom, Not, And, Or, Implies, Exists, Forall };

/// Logic formula over program variables, quantified variables and
/// procedure-symbol applications. Atoms are integer expressions read as
/// "non-zero". Nodes are immutable and shared.
struct Formula {
  FormulaKind kind = FormulaKind::True;
  ExprPtr atom;
  std::vector<FormulaPtr> kids;
  std::vector<BoundVar> vars;

  static FormulaPtr top();
  static FormulaPtr bottom();
  static FormulaPtr make_atom(ExprPtr e);
  static FormulaPtr negate(FormulaPtr f);
  static FormulaPtr conj(std::vector<FormulaPtr> kids);
  static FormulaPtr disj(std::vector<FormulaPtr> kids);
  static FormulaPtr implies(FormulaPtr lhs, FormulaPtr rhs);
  static FormulaPtr exists(std::vector<BoundVar> vars, FormulaPtr body);
  static FormulaPtr forall(std::vector<BoundVar> vars, FormulaPtr body);

  /// `lhs == rhs` as an atom.
  static FormulaPtr eq(ExprPtr lhs, ExprPtr rhs);
};

/// Reads a branch condition as a formula, lifting `&&`, `||` and `!` to
/// formula connectives.
FormulaPtr from_condition(const ExprPtr& cond);

bool is_quantifier(const Formula& f);

/// Structural equality (bound names must match exactly).
bool equal(const FormulaPtr& a, const FormulaPtr& b);

/// Key that is identical for alpha-equivalent formulas.
std::string alpha_key(const FormulaPtr& f);
bool alpha_equal(const FormulaPtr& a, const FormulaPtr& b);

/// Free variable names; procedure symbols are never included.
std::set<std::string> free_vars(const FormulaPtr& f);
/// Procedure symbols applied anywhere in the formula.
std::set<std::string> applied_symbols(const FormulaPtr& f);
/// Every name occurring anywhere (free, bound, or applied).
std::set<std::string> all_names(const FormulaPtr& f);

/// Renames free variables by `rename` (identity where it returns the
/// input). Procedure symbols and bound variables are untouched. Callers
/// must ensure the new names are not captured.
FormulaPtr rename_vars(const FormulaPtr& f,
                       const std::function<std::string(const std::string&)>& rename);
ExprPtr rename_vars(const ExprPtr& e,
                    const std::function<std::string(const std::string&)>& rename);

/// Appends `$tag` to every free variable except those in `keep`.
/// Procedure symbols are never renamed.
FormulaPtr rename_free(const FormulaPtr& f, const std::string& tag,
                       const std::set<std::string>& keep = {});
std::string tagged(const std::string& name, const std::string& tag);

/// Capture-avoiding substitution of integer variable `var` by `e`.
FormulaPtr substitute(const FormulaPtr& f, const std::string& var, const ExprPtr& e);
ExprPtr substitute(const ExprPtr& target, const std::string& var, const ExprPtr& e);

struct Prenex {
  std::vector<BoundVar> vars;
  FormulaPtr body;
};

/// Pulls every existential out to the top level, renaming the bound
/// variables apart. Throws std::invalid_argument on a universal quantifier.
/// Existentials under negation or in implication premises are rejected too:
/// only positive existentials can be lifted.
Prenex lift_existentials(const FormulaPtr& f);

/// Replaces existentials in positive position (and universals in negative
/// position) by fresh free constants, returning the constants. Other
/// quantifiers are left in place.
Prenex skolemize(const FormulaPtr& f, const std::set<std::string>& avoid);

/// Equivalence-preserving rewriting: constant folding, True/False laws,
/// flattening, duplicate removal up to alpha-equivalence, useless and
/// one-point existential elimination, and miniscoping.
FormulaPtr simplify(const FormulaPtr& f);

/// The cheap subset applied after each calculus rule: drops existentials
/// over variables that do not occur and flattens nested conjunctions.
FormulaPtr simplify_light(const FormulaPtr& f);

/// Number of top-level disjuncts after flattening.
std::size_t disjunct_count(const FormulaPtr& f);
std::vector<FormulaPtr> disjuncts(const FormulaPtr& f);
std::vector<FormulaPtr> conjuncts(const FormulaPtr& f);

/// Concrete syntax accepted by the annotation parser.
std::string to_string(const FormulaPtr& f);
std::string to_string(const ExprPtr& e);
/// Debug s-expression rendering.
std::string to_sexpr(const FormulaPtr& f);

/// Picks names of the form `base$k` that are not yet taken.
class NameSupply {
 public:
  NameSupply() = default;
  explicit NameSupply(std::set<std::string> taken) : taken_(std::move(taken)) {}

  void reserve(const std::string& name) { taken_.insert(name); }
  void reserve(const std::set<std::string>& names) {
    taken_.insert(names.begin(), names.end());
  }
  bool taken(const std::string& name) const { return taken_.count(name) != 0; }

  /// `base$1`, `base$2`, ... with `base` stripped of any `$` suffix.
  std::string fresh(const std::string& base);
  /// `prefix1`, `prefix2`, ... (used for readable temporaries like t1).
  std::string fresh_plain(const std::string& prefix);

 private:
  std::set<std::string> taken_;
  std::map<std::string, int> counters_;
};

/// Strips generated suffixes: `g$3$a` -> `g`.
std::string base_name(const std::string& name);

}  // namespace opcheck
