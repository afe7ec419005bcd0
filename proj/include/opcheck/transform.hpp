#pragma once

#include <set>
#include <string>
#include <vector>

#include "opcheck/ast.hpp"
#include "opcheck/formula.hpp"

namespace opcheck {

/// A procedure body after call elimination: calls become
/// `assert inv; havoc(g)...; assume inv && x == q(y)` and the return
/// becomes `assert inv`.
struct TransformedBody {
  StmtPtr body;  // Block; contains no Call or Return
  std::string result_var;
  int call_sites = 0;
  int assert_sites = 0;  // call_sites + 1
  std::set<std::string> temporaries;
  std::vector<std::string> havocked;  // globals havocked at each call site
};

/// The invariant used for `p`: its annotation, or `true` when absent.
FormulaPtr effective_invariant(const Procedure& p);

/// Rewrites `x := e` with x in vars(e) into `t := e; x := t` (and the
/// array-cell analogue). Fresh names come from `names`.
StmtPtr normalize_self_assign(const StmtPtr& s, NameSupply& names);

/// `inv` is the invariant asserted at call sites and at the end; the
/// assumption after a call to another procedure also includes the callee's
/// own annotation.
TransformedBody transform_body(const Library& lib, const Procedure& p, const FormulaPtr& inv);

/// g1 == c1 && ... && gN == cN; array globals get a quantified default.
FormulaPtr init_formula(const Library& lib);

/// Every name a fresh variable must avoid when working on `p`.
std::set<std::string> reserved_names(const Library& lib, const Procedure& p,
                                     const FormulaPtr& inv);

/// Sort of a program variable name in the context of `lib`.
Sort sort_of_name(const Library& lib, const std::string& name);

}  // namespace opcheck
