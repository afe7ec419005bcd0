#pragma once

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "opcheck/ast.hpp"
#include "opcheck/formula.hpp"
#include "opcheck/sexpr.hpp"

namespace opcheck {

/// Sorts of program variables and arities of procedure symbols. Names with
/// generated suffixes (`g$1`, `g$a`) take the sort of their base name.
struct SymbolTable {
  std::map<std::string, Sort> sorts;
  std::map<std::string, int> arities;
  /// When false, unknown procedure symbols get the arity of their first use.
  bool strict = true;

  static SymbolTable for_library(const Library& lib);
  Sort sort(const std::string& name) const;
};

struct SmtError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A self-contained satisfiability query.
struct SmtQuery {
  std::string label;
  std::string logic = "ALL";
  std::map<std::string, Sort> constants;
  std::map<std::string, int> functions;
  std::vector<std::string> assertions;

  /// The exact script sent to the solver.
  std::string text() const;
};

/// Builds a query asserting every formula; free names are declared using
/// `table`. Throws SmtError on an undeclared procedure symbol.
SmtQuery make_query(const std::string& label, const std::vector<FormulaPtr>& asserted,
                    const SymbolTable& table);

std::string smt_formula(const FormulaPtr& f);
std::string smt_int_term(const ExprPtr& e);
std::string smt_sort(Sort s);
std::string smt_symbol(const std::string& name);

// ---------------------------------------------------------------------------
// Models
// ---------------------------------------------------------------------------

struct ModelValue;
using ModelValuePtr = std::shared_ptr<const ModelValue>;

struct ModelValue {
  enum class Kind { Int, Array, Function, Opaque } kind = Kind::Opaque;
  std::string text;  // decimal text for Int; raw s-expression otherwise
  std::optional<Int> value;  // Int that fits in 64 bits
  ModelValuePtr fallback;  // Array default / Function else-branch
  std::vector<std::pair<std::vector<Int>, ModelValuePtr>> entries;

  /// Value at an index path for arrays (recursing into nested arrays) or at
  /// an argument tuple for functions.
  std::optional<Int> at(const std::vector<Int>& key) const;
};

using Model = std::map<std::string, ModelValuePtr>;

/// Reads a `(model ...)` or bare list of define-fun forms.
Model parse_model(const SExpr& e);

// ---------------------------------------------------------------------------
// Solver process
// ---------------------------------------------------------------------------

enum class Answer { Sat, Unsat, Unknown, Timeout };
const char* to_string(Answer a);

struct SolverConfig {
  std::string command = "z3";
  std::vector<std::string> args = {"-in"};
  double timeout_s = 10.0;

  /// Uses $OPCHECK_SOLVER (a command line split on spaces) when set.
  static SolverConfig from_environment();
  /// `path` with no extra args gets `-in` when it names z3.
  static SolverConfig for_command(const std::string& path, std::vector<std::string> args);
};

struct SolverResult {
  Answer answer = Answer::Unknown;
  Model model;
  std::string reason;
  double time_ms = 0;
  std::string output;
};

/// Could not start the solver, or its output was not a verdict.
struct SolverError : std::runtime_error {
  enum class Kind { Spawn, Protocol } kind;
  SolverError(Kind k, const std::string& what) : std::runtime_error(what), kind(k) {}
};

/// Runs one script in a fresh solver process with a wall-clock timeout.
SolverResult run_solver(const SolverConfig& cfg, const std::string& script);

/// Output of (get-info :name) and (get-info :version), e.g. "Z3 5.1.0".
std::string solver_identity(const SolverConfig& cfg);

/// Raw process run used by the driver: feeds `input` to stdin and returns
/// stdout. `timed_out` is set when the process was killed.
std::string run_process(const std::string& command, const std::vector<std::string>& args,
                        const std::string& input, double timeout_s, bool& timed_out);

}  // namespace opcheck
