#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "opcheck/ast.hpp"
#include "opcheck/interp.hpp"
#include "opcheck/smtlib.hpp"
#include "opcheck/vcgen.hpp"

namespace opcheck::testing {

std::string source_dir();
std::string corpus_dir();
std::string read_file(const std::string& path);

/// Parses and validates a corpus program; throws on any diagnostic.
Library load_corpus_file(const std::string& file);

/// Solver used by the tests ($OPCHECK_SOLVER or z3 on PATH).
SolverConfig test_solver();

struct CommandResult {
  int exit_code = -1;
  std::string out;  // stdout
  std::string err;  // stderr
};

/// Runs the opcheck binary with `args`.
CommandResult run_cli(const std::vector<std::string>& args);

// ---------------------------------------------------------------------------
// Random terms
// ---------------------------------------------------------------------------

/// Random integer expression over `vars` with constants in [-4, 4].
ExprPtr random_expr(std::mt19937_64& rng, int depth, const std::vector<std::string>& vars);

/// Random formula over `vars`. With `quantifiers` set, some subformulas
/// bind one of the variables with exists or forall.
FormulaPtr random_formula(std::mt19937_64& rng, int depth, const std::vector<std::string>& vars,
                          bool quantifiers);

/// Closed environment over integer scalars only; quantifiers range over
/// `domain`.
EvalEnv scalar_env(const std::map<std::string, Int>& values, std::vector<Int> domain);

// ---------------------------------------------------------------------------
// Concrete execution of transformed bodies
// ---------------------------------------------------------------------------

/// Runs a transformed body on concrete values. Each call site (the assume
/// carrying the original call) runs the real callee on the machine, which
/// fixes the havocked globals and the equation variable.
struct TbExecution {
  bool completed = false;
  std::string failure;
  std::vector<bool> decisions;
  std::map<std::string, Int> locals;
  GlobalState globals;
  /// Every integer and array value the run produced.
  std::set<Int> ints;
  std::vector<ArrayValue> arrays;
  int assumes_checked = 0, assumes_failed = 0;
  int asserts_checked = 0, asserts_failed = 0;
};

TbExecution execute_tb(const Program& prog, const Procedure& p, const TransformedBody& tb,
                       const GlobalState& start, const std::vector<Int>& args, IoTable& table,
                       std::uint64_t fuel);

/// Environment over the final state of `ex`. Quantifiers range over the
/// values the run produced (and the table's arguments and results).
EvalEnv final_env(const Library& lib, const TbExecution& ex, const IoTable& table);

/// Index of the path whose decisions match the execution, or -1.
int matching_path(const PostVcResult& pv, const TbExecution& ex);

/// Runs the transformed body of `proc` from `envs` random reachable states
/// and evaluates the matching path formula on the final state. A conclusive
/// check is one where the start state satisfies the precondition and the
/// path formula evaluates to true or false. The negative control perturbs
/// the result and expects false.
struct PostSoundness {
  int envs = 0;
  int conclusive = 0;
  int passed = 0;
  int negatives = 0;  // conclusive negative controls
  int rejected = 0;  // negative controls evaluating to false
  std::vector<std::string> failures;
};

PostSoundness check_post_soundness(const Library& lib, const std::string& proc, int envs,
                                   std::uint64_t seed);

}  // namespace opcheck::testing
