#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "opcheck/ast.hpp"
#include "opcheck/formula.hpp"
#include "opcheck/interp.hpp"
#include "opcheck/smtlib.hpp"
#include "opcheck/vcgen.hpp"

namespace opcheck {

enum class Approach { IW, EA };
enum class VerdictKind { PureCertified, NotCertified, Unknown };
enum class FailureKind { None, InvariantViolation, ImpurityWitness, TooWeakToCertify };

const char* to_string(Approach a);
const char* to_string(VerdictKind k);
const char* to_string(FailureKind k);

struct QueryStat {
  int index = 0;  // position in the run, also the --emit-smt file number
  std::string label;
  Answer answer = Answer::Unknown;
  double time_ms = 0;
};

struct SolverStats {
  std::string solver;
  std::vector<QueryStat> queries;
};

struct Verdict {
  std::string proc;
  Approach approach = Approach::IW;
  VerdictKind kind = VerdictKind::Unknown;
  FailureKind failure = FailureKind::None;
  std::string reason;  // "timeout" or "solver-unknown" for Unknown
  std::string note;
  /// Model of the failing query: constant name -> value text.
  std::map<std::string, std::string> model;
  std::optional<Witness> witness;  // concrete impurity replayed by the interpreter
  SolverStats stats;
};

/// Runs queries one by one, numbering them and optionally writing each
/// script to `<emit_dir>/NNN-label.smt2` before it is sent.
class QueryRunner {
 public:
  explicit QueryRunner(SolverConfig cfg, std::string emit_dir = {});

  SolverResult run(const SmtQuery& q);
  const SolverConfig& config() const { return cfg_; }
  /// Every query issued so far.
  const std::vector<QueryStat>& log() const { return log_; }

 private:
  SolverConfig cfg_;
  std::string emit_dir_;
  std::vector<QueryStat> log_;
};

/// The two impurity-witness formulas of a procedure. Both are skolemized:
/// the variables in `*_consts` are fresh free constants.
struct IwFormulas {
  PostVcResult pv;
  FormulaPtr not_vc;
  FormulaPtr twin;
  std::vector<BoundVar> not_vc_consts, twin_consts;
  std::vector<std::string> formals_a, formals_b;
  std::string result_a, result_b;
};

/// Globals that no procedure assigns. They denote the same value in both
/// copies of the twin formula.
std::set<std::string> read_only_globals(const Library& lib);

IwFormulas build_iw(const Library& lib, const Procedure& p, const FormulaPtr& inv);

/// ∀x̄. vc ∧ (post ⇒ r = p(n̄)), with every free variable bound.
FormulaPtr build_ea(const Library& lib, const Procedure& p, const FormulaPtr& inv);

struct CheckOptions {
  SolverConfig solver;
  Approach approach = Approach::IW;
  std::string emit_smt_dir;
  /// Replaces annotations; procedures missing here use their own.
  std::map<std::string, FormulaPtr> invariants;
  /// Only these procedures (all when empty).
  std::vector<std::string> procedures;
  std::uint64_t seed = 1;
  int replay_trials = 500;
  Int max_arg = 12;
  std::uint64_t fuel = 1000000;
};

struct Classification {
  FailureKind kind = FailureKind::TooWeakToCertify;
  std::optional<Witness> witness;
  std::string note;
};

/// Replays the α/β inputs of a satisfying twin model on the interpreter,
/// then tries a seeded random search. Impurity is only claimed with a
/// concrete witness.
Classification classify_twin_model(const Library& lib, const Procedure& p, const IwFormulas& iw,
                                   const Model& model, const CheckOptions& opts);

Verdict check_procedure(const Library& lib, const Procedure& p, const CheckOptions& opts,
                        QueryRunner& runner);

std::vector<Verdict> check_impurity_witness(const Library& lib, const CheckOptions& opts,
                                            QueryRunner& runner);
std::vector<Verdict> check_existential(const Library& lib, const CheckOptions& opts,
                                       QueryRunner& runner);

/// 0 all certified, 1 some NotCertified, 2 some Unknown.
int exit_code(const std::vector<Verdict>& verdicts);

/// Constants of `m` restricted to integer values and printed as text.
std::map<std::string, std::string> model_strings(const Model& m);

}  // namespace opcheck
