#pragma once

#include <vector>

#include "opcheck/ast.hpp"
#include "opcheck/formula.hpp"
#include "opcheck/transform.hpp"

namespace opcheck {

/// One disjunct of a postcondition together with the branch decisions
/// (true = then-branch) taken to reach it, in execution order.
struct PathPost {
  FormulaPtr formula;
  std::vector<bool> decisions;
};

/// `pre ==> inv` for one assert site.
struct Obligation {
  int site = -1;
  FormulaPtr pre;
  FormulaPtr asserted;
  FormulaPtr formula;
};

struct PostVcResult {
  TransformedBody tb;
  FormulaPtr init;
  std::vector<PathPost> paths;
  FormulaPtr post;  // disjunction of the path formulas
  std::vector<Obligation> obligations;
  FormulaPtr vc;  // one conjunct per assert site, then init ==> inv
};

/// Strongest-postcondition calculator over transformed bodies. Every
/// quantifier it introduces gets a fresh `x$k` name.
class PostCalculus {
 public:
  PostCalculus(const Library& lib, NameSupply names) : lib_(lib), names_(std::move(names)) {}

  std::vector<PathPost> post(const std::vector<PathPost>& pre, const StmtPtr& s);
  FormulaPtr post(const FormulaPtr& pre, const StmtPtr& s);
  /// Obligations collected by `post` so far.
  const std::vector<Obligation>& obligations() const { return obligations_; }
  NameSupply& names() { return names_; }

 private:
  std::vector<PathPost> assign(const std::vector<PathPost>& pre, const StmtPtr& s);
  std::vector<PathPost> array_assign(const std::vector<PathPost>& pre, const StmtPtr& s);
  std::vector<PathPost> havoc(const std::vector<PathPost>& pre, const std::string& x);

  const Library& lib_;
  NameSupply names_;
  std::vector<Obligation> obligations_;
};

/// VC(pre, s): conjunction of `pre_site ==> e` over the asserts in `s`.
FormulaPtr vc(const Library& lib, const FormulaPtr& pre, const StmtPtr& s, NameSupply names);

PostVcResult postvc(const Library& lib, const Procedure& p, const FormulaPtr& inv);

/// Number of root-to-exit paths through the conditional structure.
std::size_t count_paths(const StmtPtr& s);

}  // namespace opcheck
