#pragma once

#include <string>
#include <vector>

#include "opcheck/ast.hpp"
#include "opcheck/checker.hpp"
#include "opcheck/formula.hpp"
#include "opcheck/vcgen.hpp"

namespace opcheck {

/// Disjunction over the assert sites of the incoming condition, with every
/// non-global variable existentially quantified, then simplified.
FormulaPtr next_candidate(const Library& lib, const PostVcResult& pv);

enum class Tri { Yes, No, Unknown };
const char* to_string(Tri t);

struct ValidityResult {
  Tri answer = Tri::Unknown;
  Model countermodel;  // set when the answer is No
  std::string reason;
};

/// Validity of `a ==> b` by unsatisfiability of its negation.
ValidityResult implies_valid(const Library& lib, const FormulaPtr& a, const FormulaPtr& b,
                             QueryRunner& runner, const std::string& label);

/// Both implications valid. The countermodel comes from the first failing
/// direction.
ValidityResult equiv(const Library& lib, const FormulaPtr& a, const FormulaPtr& b,
                     QueryRunner& runner, const std::string& label = "equiv");

/// `simplify`, then drops every disjunct the solver shows to be implied by
/// the remaining ones.
FormulaPtr simplify_with_solver(const Library& lib, const FormulaPtr& f, QueryRunner& runner,
                                const std::string& label = "subsume");

struct InvGenResult {
  bool converged = false;
  int iterations = 0;  // m with I_m equivalent to I_{m+1}
  FormulaPtr invariant;  // I_m on success, the last candidate otherwise
  std::vector<FormulaPtr> history;  // I_0, I_1, ...
  std::string reason;  // why no fixpoint was found
};

InvGenResult generate_invariant(const Library& lib, const Procedure& p, int max_iters,
                                QueryRunner& runner);

}  // namespace opcheck
