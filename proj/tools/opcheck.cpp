// opcheck: observational purity checker command line.

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>
#include <tuple>

#include "opcheck/checker.hpp"
#include "opcheck/frontend.hpp"
#include "opcheck/interp.hpp"
#include "opcheck/invgen.hpp"
#include "opcheck/report.hpp"
#include "opcheck/transform.hpp"

using namespace opcheck;

namespace {

constexpr int kUsageError = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolverFlags {
  std::string solver;
  std::vector<std::string> solver_args;
  double timeout = 10;

  SolverConfig config() const {
    SolverConfig cfg = solver.empty() ? SolverConfig::from_environment()
                                      : SolverConfig::for_command(solver, solver_args);
    if (solver.empty() && !solver_args.empty()) cfg.args = solver_args;
    cfg.timeout_s = timeout;
    return cfg;
  }
};

Library load_library(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  Library lib;
  try {
    lib = parse_library(ss.str());
  } catch (const ParseError& e) {
    throw UsageError(path + ":" + e.what());
  }
  auto diags = validate(lib);
  if (!diags.empty()) {
    std::string msg;
    for (const auto& d : diags) msg += path + ":" + to_string(d) + "\n";
    msg.pop_back();
    throw UsageError(msg);
  }
  return lib;
}

std::vector<const Procedure*> selected(const Library& lib, const std::vector<std::string>& names) {
  std::vector<const Procedure*> out;
  for (const auto& n : names)
    if (!lib.find_procedure(n)) throw UsageError("no procedure named " + n);
  for (const auto& p : lib.procedures)
    if (names.empty() || std::find(names.begin(), names.end(), p.name) != names.end())
      out.push_back(&p);
  return out;
}

std::map<std::string, FormulaPtr> parse_invariants(const Library& lib,
                                                   const std::vector<std::string>& specs) {
  std::map<std::string, FormulaPtr> out;
  for (const auto& s : specs) {
    auto eq = s.find('=');
    if (eq == std::string::npos) throw UsageError("--invariant expects NAME=FORMULA, got " + s);
    std::string name = s.substr(0, eq);
    if (!lib.find_procedure(name)) throw UsageError("no procedure named " + name);
    FormulaPtr f;
    try {
      f = parse_formula(s.substr(eq + 1));
    } catch (const ParseError& e) {
      throw UsageError("--invariant " + name + ": " + e.what());
    }
    auto diags = check_invariant_scope(lib, f);
    if (!diags.empty()) throw UsageError("--invariant " + name + ": " + to_string(diags[0]));
    out[name] = f;
  }
  return out;
}

std::string call_text(const std::string& proc, const std::vector<Int>& args) {
  std::string s = proc + "(";
  for (std::size_t i = 0; i < args.size(); ++i) s += (i ? ", " : "") + std::to_string(args[i]);
  return s + ")";
}

std::string seq_text(const CallSeq& seq) {
  std::string s;
  for (std::size_t i = 0; i < seq.size(); ++i)
    s += (i ? "; " : "") + call_text(seq[i].first, seq[i].second);
  return s;
}

void print_witness(std::ostream& os, const Witness& w) {
  os << "  " << call_text(w.proc, w.args) << " returned " << w.first << " and " << w.second
     << "\n";
  os << "  first run:  " << seq_text(w.first_sequence) << "\n";
  os << "  second run: " << seq_text(w.second_sequence) << "\n";
}

const char* failure_text(FailureKind k) {
  switch (k) {
    case FailureKind::InvariantViolation: return "invariant violation";
    case FailureKind::ImpurityWitness: return "impurity witness";
    case FailureKind::TooWeakToCertify: return "invariant too weak to certify";
    case FailureKind::None: break;
  }
  return "";
}

void print_verdict(std::ostream& os, const Verdict& v) {
  switch (v.kind) {
    case VerdictKind::PureCertified:
      os << v.proc << ": PURE (certified)\n";
      return;
    case VerdictKind::Unknown:
      os << v.proc << ": UNKNOWN (" << v.reason << ")\n";
      return;
    case VerdictKind::NotCertified:
      os << v.proc << ": NOT CERTIFIED (" << failure_text(v.failure) << ")\n";
      if (v.witness) print_witness(os, *v.witness);
      if (!v.note.empty() && !v.witness) os << "  note: " << v.note << "\n";
      if (!v.model.empty()) {
        os << "  model:";
        for (const auto& [k, val] : v.model) {
          if (val.find('(') != std::string::npos) continue;
          os << " " << k << "=" << val;
        }
        os << "\n";
      }
      return;
  }
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

struct CheckArgs {
  std::string file;
  std::string approach = "iw";
  SolverFlags solver;
  std::string emit_smt;
  bool emit_vc = false, emit_tb = false, json = false;
  std::uint64_t seed = 1;
  int trials = 500;
  std::vector<std::string> procs;
  std::vector<std::string> invariants;
};

int run_check(const CheckArgs& a) {
  Library lib = load_library(a.file);
  CheckOptions opts;
  opts.solver = a.solver.config();
  opts.approach = a.approach == "ea" ? Approach::EA : Approach::IW;
  opts.emit_smt_dir = a.emit_smt;
  opts.seed = a.seed;
  opts.replay_trials = a.trials;
  opts.invariants = parse_invariants(lib, a.invariants);
  auto procs = selected(lib, a.procs);
  for (const auto* p : procs) opts.procedures.push_back(p->name);

  std::ostream& out = std::cout;
  if (a.emit_tb || a.emit_vc) {
    for (const auto* p : procs) {
      auto it = opts.invariants.find(p->name);
      FormulaPtr inv = it != opts.invariants.end() ? it->second : effective_invariant(*p);
      PostVcResult pv = postvc(lib, *p, inv);
      if (a.emit_tb) out << "// " << p->name << " transformed body\n" << print_stmt(pv.tb.body, 0);
      if (a.emit_vc) {
        out << "// " << p->name << " post\n" << to_string(pv.post) << "\n";
        out << "// " << p->name << " vc\n" << to_string(pv.vc) << "\n";
      }
    }
  }

  QueryRunner runner(opts.solver, opts.emit_smt_dir);
  std::vector<Verdict> verdicts = opts.approach == Approach::EA
                                      ? check_existential(lib, opts, runner)
                                      : check_impurity_witness(lib, opts, runner);
  if (a.json) {
    ReportContext ctx;
    ctx.file = a.file;
    ctx.approach = opts.approach;
    ctx.solver = solver_identity(opts.solver);
    ctx.timeout_s = opts.solver.timeout_s;
    ctx.seed = a.seed;
    out << dump_report(check_report(ctx, verdicts));
  } else {
    for (const auto& v : verdicts) print_verdict(out, v);
  }
  return exit_code(verdicts);
}

struct GenArgs {
  std::string file;
  SolverFlags solver;
  std::vector<std::string> procs;
  int max_iters = 8;
  bool json = false;
  std::string emit_smt;
};

int run_gen(const GenArgs& a) {
  Library lib = load_library(a.file);
  SolverConfig cfg = a.solver.config();
  QueryRunner runner(cfg, a.emit_smt);
  std::vector<std::pair<std::string, InvGenResult>> results;
  bool all = true;
  for (const auto* p : selected(lib, a.procs)) {
    InvGenResult r = generate_invariant(lib, *p, a.max_iters, runner);
    all = all && r.converged;
    results.emplace_back(p->name, r);
  }
  if (a.json) {
    ReportContext ctx;
    ctx.file = a.file;
    ctx.solver = solver_identity(cfg);
    ctx.timeout_s = cfg.timeout_s;
    std::cout << dump_report(invgen_report(ctx, results, runner.log()));
  } else {
    for (const auto& [name, r] : results) {
      if (r.converged)
        std::cout << "// " << name << ": fixpoint I_" << r.iterations << "\n";
      else
        std::cout << "// " << name << ": no fixpoint (" << r.reason << "), last candidate\n";
      std::cout << "invariant " << to_string(r.invariant) << ";\n";
    }
  }
  return all ? 0 : 2;
}

struct OracleArgs {
  std::string file;
  OracleConfig cfg;
  bool json = false;
};

int run_oracle(const OracleArgs& a) {
  Library lib = load_library(a.file);
  for (const auto& n : a.cfg.procedures)
    if (!lib.find_procedure(n)) throw UsageError("no procedure named " + n);
  OracleResult r = oracle_purity(lib, a.cfg);
  if (a.json) {
    nlohmann::json j = {{"command", "oracle"},
                        {"file", a.file},
                        {"seed", a.cfg.seed},
                        {"trials", a.cfg.trials},
                        {"max_arg", a.cfg.max_arg},
                        {"fuel", a.cfg.fuel},
                        {"sequences", r.sequences},
                        {"skipped", r.skipped},
                        {"calls", r.calls},
                        {"witness", r.witness ? to_json(*r.witness) : nlohmann::json(nullptr)}};
    std::cout << dump_report(j);
  } else if (r.witness) {
    std::cout << r.witness->proc << ": IMPURE (concrete witness)\n";
    print_witness(std::cout, *r.witness);
  } else {
    std::cout << "no witness in " << r.sequences << " sequences (" << r.calls << " calls, "
              << r.skipped << " skipped)\n";
  }
  return r.witness ? 1 : 0;
}

struct EmitArgs {
  std::string file;
  std::string approach = "iw";
  std::vector<std::string> procs;
  std::vector<std::string> invariants;
};

int run_emit(const EmitArgs& a) {
  Library lib = load_library(a.file);
  auto invs = parse_invariants(lib, a.invariants);
  SymbolTable table = SymbolTable::for_library(lib);
  for (const auto* p : selected(lib, a.procs)) {
    auto it = invs.find(p->name);
    FormulaPtr inv = it != invs.end() ? it->second : effective_invariant(*p);
    if (a.approach == "ea") {
      std::cout << make_query(p->name + " ea", {build_ea(lib, *p, inv)}, table).text();
      continue;
    }
    IwFormulas iw = build_iw(lib, *p, inv);
    for (auto [label, f, consts] : {std::tuple{" not-vc", iw.not_vc, iw.not_vc_consts},
                                    std::tuple{" twin", iw.twin, iw.twin_consts}}) {
      SmtQuery q = make_query(p->name + label, {f}, table);
      for (const auto& c : consts)
        if (q.constants.count(c.name)) q.constants[c.name] = c.sort;
      std::cout << q.text();
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Observational purity checker"};
  app.require_subcommand(1);

  auto add_solver = [](CLI::App* sub, SolverFlags& s) {
    sub->add_option("--solver", s.solver, "Solver executable (default: $OPCHECK_SOLVER or z3)");
    sub->add_option("--solver-arg", s.solver_args, "Extra solver argument (repeatable)")
        ->allow_extra_args(false);
    sub->add_option("--timeout", s.timeout, "Per-query timeout in seconds")
        ->check(CLI::PositiveNumber);
  };

  CheckArgs ca;
  auto* check = app.add_subcommand("check", "Check every procedure of a program");
  check->add_option("file", ca.file, "Program file")->required();
  check->add_option("--approach", ca.approach, "iw (default) or ea")
      ->check(CLI::IsMember({"iw", "ea"}));
  add_solver(check, ca.solver);
  check->add_option("--emit-smt", ca.emit_smt, "Write each solver query to DIR/NNN-label.smt2");
  check->add_flag("--emit-vc", ca.emit_vc, "Print post and vc of each procedure");
  check->add_flag("--emit-tb", ca.emit_tb, "Print the transformed body of each procedure");
  check->add_flag("--json", ca.json, "Print the JSON report");
  check->add_option("--seed", ca.seed, "Seed for witness search");
  check->add_option("--trials", ca.trials, "Random call sequences tried when replaying a model")
      ->check(CLI::PositiveNumber);
  check->add_option("--proc", ca.procs, "Only this procedure (repeatable)")
      ->allow_extra_args(false);
  check->add_option("--invariant", ca.invariants, "NAME=FORMULA replaces an annotation")
      ->allow_extra_args(false);

  GenArgs ga;
  auto* gen = app.add_subcommand("gen-invariant", "Infer invariants by iterative weakening");
  gen->add_option("file", ga.file, "Program file")->required();
  add_solver(gen, ga.solver);
  gen->add_option("--proc", ga.procs, "Only this procedure (repeatable)")
      ->allow_extra_args(false);
  gen->add_option("--max-iters", ga.max_iters, "Iteration budget")->check(CLI::PositiveNumber);
  gen->add_flag("--json", ga.json, "Print the JSON report");
  gen->add_option("--emit-smt", ga.emit_smt, "Write each solver query to DIR/NNN-label.smt2");

  OracleArgs oa;
  auto* orc = app.add_subcommand("oracle", "Search for impurity by random call sequences");
  orc->add_option("file", oa.file, "Program file")->required();
  orc->add_option("--trials", oa.cfg.trials, "Number of call sequences")
      ->check(CLI::PositiveNumber);
  orc->add_option("--max-arg", oa.cfg.max_arg, "Arguments are drawn from [-N, N]")
      ->check(CLI::NonNegativeNumber);
  orc->add_option("--seed", oa.cfg.seed, "Random seed");
  orc->add_option("--fuel", oa.cfg.fuel, "Step budget per top-level call");
  orc->add_option("--proc", oa.cfg.procedures, "Only call this procedure (repeatable)")
      ->allow_extra_args(false);
  orc->add_flag("--json", oa.json, "Print the JSON report");

  EmitArgs ea;
  auto* emit = app.add_subcommand("emit", "Print the solver queries without running them");
  emit->add_option("file", ea.file, "Program file")->required();
  emit->add_option("--approach", ea.approach, "iw (default) or ea")
      ->check(CLI::IsMember({"iw", "ea"}));
  emit->add_option("--proc", ea.procs, "Only this procedure (repeatable)")
      ->allow_extra_args(false);
  emit->add_option("--invariant", ea.invariants, "NAME=FORMULA replaces an annotation")
      ->allow_extra_args(false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (*check) return run_check(ca);
    if (*gen) return run_gen(ga);
    if (*orc) return run_oracle(oa);
    if (*emit) return run_emit(ea);
  } catch (const UsageError& e) {
    std::cerr << "opcheck: " << e.what() << "\n";
    return kUsageError;
  } catch (const SolverError& e) {
    std::cerr << "opcheck: solver error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "opcheck: " << e.what() << "\n";
    return kUsageError;
  }
  return kUsageError;
}
