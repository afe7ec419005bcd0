#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "opcheck/ast.hpp"
#include "opcheck/formula.hpp"

namespace opcheck {

/// Total map from one or two integer keys to integers, with a default.
struct ArrayValue {
  Int fallback = 0;
  std::map<std::pair<Int, Int>, Int> cells;

  Int get(Int i, Int j = 0) const {
    auto it = cells.find({i, j});
    return it == cells.end() ? fallback : it->second;
  }
  void set(Int i, Int j, Int v) {
    if (v == fallback)
      cells.erase({i, j});
    else
      cells[{i, j}] = v;
  }
  bool operator==(const ArrayValue&) const = default;
};

/// Values of all globals, in declaration order.
struct GlobalState {
  std::vector<Int> scalars;  // unused slots for arrays stay 0
  std::vector<ArrayValue> arrays;  // unused slots for scalars stay empty
  bool operator==(const GlobalState&) const = default;
};

/// One procedure invocation (a trace) observed while running a client.
struct TraceRecord {
  std::string proc;
  std::vector<Int> args;
  std::optional<Int> result;  // unset if the run stopped inside the trace
  int depth = 0;  // 0 for top-level calls
  int parent = -1;  // index of the enclosing trace
  int top_level = 0;  // index of the top-level call in the client sequence
  std::optional<GlobalState> entry, exit;
};

enum class RunStatus { Completed, FuelExhausted, Overflow };
const char* to_string(RunStatus s);

struct ClientRun {
  RunStatus status = RunStatus::Completed;
  std::vector<Int> results;  // one per completed top-level call
  std::vector<TraceRecord> log;
};

using CallSeq = std::vector<std::pair<std::string, std::vector<Int>>>;

/// Library compiled to slot-indexed form. Build once, share between
/// machines.
class Program {
 public:
  explicit Program(const Library& lib);
  ~Program();
  Program(const Program&) = delete;
  Program& operator=(const Program&) = delete;

  const Library& library() const { return lib_; }
  int proc_index(const std::string& name) const;
  int global_index(const std::string& name) const;
  GlobalState initial_globals() const;

  struct Impl;
  const Impl& impl() const { return *impl_; }

 private:
  Library lib_;
  std::unique_ptr<Impl> impl_;
};

/// Small-step machine for the operational semantics: a stack of frames
/// (continuation, locals) over a global store.
class Machine {
 public:
  explicit Machine(const Program& prog);
  ~Machine();

  void reset_globals();
  const GlobalState& globals() const { return globals_; }
  void set_globals(GlobalState g) { globals_ = std::move(g); }

  /// Top-level call: pushes the first frame. Requires an empty stack.
  void begin_call(int proc, const std::vector<Int>& args);
  /// Executes one transition. Returns the result once the outermost frame
  /// returns; the stack is empty afterwards.
  std::optional<Int> step();
  bool idle() const;
  std::size_t depth() const;

  /// Name-based inspection of the top frame and the globals.
  std::optional<Int> local(const std::string& name) const;
  std::optional<Int> global_scalar(const std::string& name) const;
  /// Next statement of the top frame, if any.
  const Stmt* next_statement() const;

  /// Runs a whole top-level call. Throws ArithmeticOverflow; returns
  /// nullopt when `fuel` steps are used up.
  std::optional<Int> call(int proc, const std::vector<Int>& args, std::uint64_t fuel);

  /// Trace records are appended here while `log` is set.
  std::vector<TraceRecord>* log = nullptr;
  bool snapshots = false;
  int top_level_index = 0;

 private:
  struct Frame;
  const Program& prog_;
  GlobalState globals_;
  std::vector<Frame> stack_;
};

/// Most general client: initialises globals once, then performs `calls`
/// in order.
ClientRun run_client(const Program& prog, const CallSeq& calls, std::uint64_t fuel,
                     bool snapshots = false);
ClientRun run_client(const Library& lib, const CallSeq& calls, std::uint64_t fuel,
                     bool snapshots = false);

// ---------------------------------------------------------------------------
// Purity oracle
// ---------------------------------------------------------------------------

struct IoEntry {
  Int result = 0;
  int sequence = -1;
  int call = -1;  // top-level call index within the sequence
};

/// Observed input/output pairs per procedure.
using IoTable = std::map<std::string, std::map<std::vector<Int>, IoEntry>>;

struct OracleConfig {
  int trials = 10000;
  Int max_arg = 12;
  std::uint64_t seed = 1;
  std::uint64_t fuel = 1000000;
  int min_length = 2;
  int max_length = 8;
  /// Restrict top-level calls to these procedures (all when empty).
  std::vector<std::string> procedures;
  /// Keep up to this many distinct global states seen between calls.
  std::size_t collect_states = 0;
};

struct Witness {
  std::string proc;
  std::vector<Int> args;
  Int first = 0, second = 0;
  CallSeq first_sequence, second_sequence;
};

struct OracleResult {
  std::optional<Witness> witness;
  int sequences = 0;
  int skipped = 0;  // stopped by fuel or overflow
  int calls = 0;
  IoTable table;
  std::vector<CallSeq> history;
  /// Distinct global states seen between top-level calls.
  std::vector<GlobalState> states;
};

/// Looks for two traces with equal input and different output across
/// seeded random call sequences.
OracleResult oracle_purity(const Program& prog, const OracleConfig& cfg);
OracleResult oracle_purity(const Library& lib, const OracleConfig& cfg);

/// Records all traces of `run` (sequence number `seq`) into `table`.
/// Returns the first conflict found.
std::optional<Witness> record_traces(IoTable& table, const ClientRun& run, int seq,
                                     const std::vector<CallSeq>& history);

// ---------------------------------------------------------------------------
// Formula evaluation over concrete states
// ---------------------------------------------------------------------------

enum class Truth { False, True, Unknown };

/// Concrete interpretation for evaluating formulas. Integer quantifiers
/// range over `domain` and array quantifiers over `array_domain`;
/// procedure symbols are looked up through `apply` (nullopt means the value
/// is unknown).
///
/// With `closed` set the domains are the whole universe. Otherwise they are
/// a sample, so an existential without a witness (or a universal without a
/// counterexample) evaluates to Unknown.
struct EvalEnv {
  std::function<std::optional<Int>(const std::string&)> scalar;
  std::function<const ArrayValue*(const std::string&)> array;
  std::function<std::optional<Int>(const std::string&, const std::vector<Int>&)> apply;
  std::vector<Int> domain;
  std::vector<ArrayValue> array_domain;
  bool closed = true;
};

Truth eval_formula(const FormulaPtr& f, const EvalEnv& env);
/// nullopt when the value depends on an unknown symbol or variable.
std::optional<Int> eval_expr(const ExprPtr& e, const EvalEnv& env);

/// Environment over globals (plus optional locals) with procedure symbols
/// read from `table`. The sampled domain covers small integers, the
/// table's argument values and every stored array index.
EvalEnv make_env(const Library& lib, const GlobalState& g, const IoTable& table,
                 const std::map<std::string, Int>& locals = {});

struct InvariantViolation {
  std::string proc;
  int trace = -1;
  bool at_entry = true;
};

/// Checks `inv` at the entry and exit state of every trace of `proc` in
/// `run` (which must carry snapshots).
std::vector<InvariantViolation> check_invariant_on_run(const Library& lib,
                                                       const std::string& proc,
                                                       const FormulaPtr& inv,
                                                       const ClientRun& run,
                                                       const IoTable& table);

}  // namespace opcheck
