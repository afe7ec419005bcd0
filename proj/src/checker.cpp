#include "opcheck/checker.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "opcheck/transform.hpp"

namespace opcheck {

const char* to_string(Approach a) { return a == Approach::IW ? "iw" : "ea"; }

const char* to_string(VerdictKind k) {
  switch (k) {
    case VerdictKind::PureCertified: return "PureCertified";
    case VerdictKind::NotCertified: return "NotCertified";
    case VerdictKind::Unknown: return "Unknown";
  }
  return "?";
}

const char* to_string(FailureKind k) {
  switch (k) {
    case FailureKind::None: return "None";
    case FailureKind::InvariantViolation: return "InvariantViolation";
    case FailureKind::ImpurityWitness: return "ImpurityWitness";
    case FailureKind::TooWeakToCertify: return "TooWeakToCertify";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Query runner
// ---------------------------------------------------------------------------

QueryRunner::QueryRunner(SolverConfig cfg, std::string emit_dir)
    : cfg_(std::move(cfg)), emit_dir_(std::move(emit_dir)) {
  if (!emit_dir_.empty()) std::filesystem::create_directories(emit_dir_);
}

namespace {

std::string file_label(const std::string& label) {
  std::string out;
  for (char c : label) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
              c == '-' || c == '_';
    out += ok ? c : '-';
  }
  return out;
}

}  // namespace

SolverResult QueryRunner::run(const SmtQuery& q) {
  QueryStat stat;
  stat.index = static_cast<int>(log_.size()) + 1;
  stat.label = q.label;
  std::string script = q.text();
  if (!emit_dir_.empty()) {
    char num[16];
    std::snprintf(num, sizeof num, "%03d", stat.index);
    auto path = std::filesystem::path(emit_dir_) / (std::string(num) + "-" + file_label(q.label) + ".smt2");
    std::ofstream out(path, std::ios::binary);
    out << script;
    if (!out) throw std::runtime_error("cannot write " + path.string());
  }
  SolverResult r = run_solver(cfg_, script);
  stat.answer = r.answer;
  stat.time_ms = r.time_ms;
  log_.push_back(stat);
  return r;
}

// ---------------------------------------------------------------------------
// Formulas
// ---------------------------------------------------------------------------

std::set<std::string> read_only_globals(const Library& lib) {
  auto mut = lib.mutable_globals();
  std::set<std::string> out;
  for (const auto& g : lib.globals)
    if (!mut.count(g.name)) out.insert(g.name);
  return out;
}

IwFormulas build_iw(const Library& lib, const Procedure& p, const FormulaPtr& inv) {
  IwFormulas iw;
  iw.pv = postvc(lib, p, inv);
  auto avoid = reserved_names(lib, p, inv);
  for (const auto& n : all_names(iw.pv.vc)) avoid.insert(n);
  for (const auto& n : all_names(iw.pv.post)) avoid.insert(n);

  Prenex nv = skolemize(Formula::negate(iw.pv.vc), avoid);
  iw.not_vc = simplify_light(nv.body);
  iw.not_vc_consts = nv.vars;

  auto keep = read_only_globals(lib);
  FormulaPtr post_a = rename_free(iw.pv.post, "a", keep);
  FormulaPtr post_b = rename_free(iw.pv.post, "b", keep);
  std::vector<FormulaPtr> parts = {post_a, post_b};
  for (const auto& f : p.params) {
    iw.formals_a.push_back(tagged(f, "a"));
    iw.formals_b.push_back(tagged(f, "b"));
    parts.push_back(Formula::eq(Expr::var(iw.formals_a.back()), Expr::var(iw.formals_b.back())));
  }
  std::string r = iw.pv.tb.result_var;
  iw.result_a = keep.count(r) ? r : tagged(r, "a");
  iw.result_b = keep.count(r) ? r : tagged(r, "b");
  parts.push_back(
      Formula::negate(Formula::eq(Expr::var(iw.result_a), Expr::var(iw.result_b))));
  FormulaPtr twin = Formula::conj(parts);
  for (const auto& n : all_names(twin)) avoid.insert(n);
  Prenex tw = skolemize(twin, avoid);
  iw.twin = simplify_light(tw.body);
  iw.twin_consts = tw.vars;
  return iw;
}

FormulaPtr build_ea(const Library& lib, const Procedure& p, const FormulaPtr& inv) {
  PostVcResult pv = postvc(lib, p, inv);
  std::vector<ExprPtr> formals;
  for (const auto& f : p.params) formals.push_back(Expr::var(f));
  FormulaPtr body = Formula::conj(
      {pv.vc, Formula::implies(pv.post, Formula::eq(Expr::var(pv.tb.result_var),
                                                    Expr::apply(p.name, formals)))});
  std::vector<BoundVar> vars;
  for (const auto& v : free_vars(body)) vars.push_back({v, sort_of_name(lib, v)});
  return Formula::forall(vars, body);
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

namespace {

std::optional<Int> model_int(const Model& m, const std::string& name) {
  auto it = m.find(name);
  if (it == m.end() || it->second->kind != ModelValue::Kind::Int) return std::nullopt;
  return it->second->value;
}

}  // namespace

Classification classify_twin_model(const Library& lib, const Procedure& p, const IwFormulas& iw,
                                   const Model& model, const CheckOptions& opts) {
  Classification out;
  Program prog(lib);

  std::vector<std::vector<Int>> inputs;
  for (const auto* names : {&iw.formals_a, &iw.formals_b}) {
    std::vector<Int> args;
    bool complete = true;
    for (const auto& n : *names) {
      auto v = model_int(model, n);
      if (!v) {
        complete = false;
        break;
      }
      args.push_back(*v);
    }
    // A formal the model leaves unconstrained may take any value; 0 is as
    // good as any other.
    if (!complete) args.assign(p.params.size(), 0);
    if (std::find(inputs.begin(), inputs.end(), args) == inputs.end()) inputs.push_back(args);
  }

  bool fuel_note = false;
  std::vector<CallSeq> replays;
  for (const auto& a : inputs) replays.push_back({{p.name, a}, {p.name, a}});
  for (const auto& a : inputs)
    for (const auto& q : lib.procedures) {
      std::vector<Int> other(q.params.size(), 0);
      for (std::size_t k = 0; k < other.size() && k < a.size(); ++k) other[k] = a[k] + 1;
      replays.push_back({{p.name, a}, {q.name, other}, {p.name, a}});
      replays.push_back({{q.name, other}, {p.name, a}});
    }

  std::vector<CallSeq> history;
  IoTable table;
  for (const auto& seq : replays) {
    history.push_back(seq);
    ClientRun run = run_client(prog, seq, opts.fuel);
    if (run.status == RunStatus::FuelExhausted) fuel_note = true;
    if (run.status != RunStatus::Completed) continue;
    if (auto w = record_traces(table, run, static_cast<int>(history.size()) - 1, history)) {
      out.kind = FailureKind::ImpurityWitness;
      out.witness = std::move(w);
      out.note = "replayed from the twin model's inputs";
      return out;
    }
  }

  OracleConfig cfg;
  cfg.trials = opts.replay_trials;
  cfg.seed = opts.seed;
  cfg.fuel = opts.fuel;
  cfg.max_arg = opts.max_arg;
  for (const auto& a : inputs)
    for (Int v : a)
      if (v != INT64_MIN && (v > cfg.max_arg || v < -cfg.max_arg)) cfg.max_arg = v < 0 ? -v : v;
  if (cfg.trials > 0) {
    OracleResult res = oracle_purity(prog, cfg);
    if (res.witness) {
      out.kind = FailureKind::ImpurityWitness;
      out.witness = std::move(res.witness);
      out.note = "found by seeded random call sequences";
      return out;
    }
    if (res.skipped > 0) fuel_note = true;
  }
  out.kind = FailureKind::TooWeakToCertify;
  out.note = "no concrete impurity reproduced";
  if (fuel_note) out.note += "; some replays ran out of fuel or overflowed";
  return out;
}

// ---------------------------------------------------------------------------
// Checks
// ---------------------------------------------------------------------------

std::map<std::string, std::string> model_strings(const Model& m) {
  std::map<std::string, std::string> out;
  for (const auto& [name, v] : m) out[name] = v->text;
  return out;
}

namespace {

FormulaPtr invariant_for(const Procedure& p, const CheckOptions& opts) {
  auto it = opts.invariants.find(p.name);
  if (it != opts.invariants.end() && it->second) return it->second;
  return effective_invariant(p);
}

SmtQuery query_for(const std::string& label, const FormulaPtr& f,
                   const std::vector<BoundVar>& consts, const SymbolTable& table) {
  SmtQuery q = make_query(label, {f}, table);
  for (const auto& c : consts)
    if (q.constants.count(c.name)) q.constants[c.name] = c.sort;
  return q;
}

std::vector<QueryStat> since(const QueryRunner& r, std::size_t start) {
  return {r.log().begin() + static_cast<long>(start), r.log().end()};
}

const char* unknown_reason(const SolverResult& r) {
  return r.answer == Answer::Timeout ? "timeout" : "solver-unknown";
}

}  // namespace

Verdict check_procedure(const Library& lib, const Procedure& p, const CheckOptions& opts,
                        QueryRunner& runner) {
  Verdict v;
  v.proc = p.name;
  v.approach = opts.approach;
  std::size_t start = runner.log().size();
  FormulaPtr inv = invariant_for(p, opts);
  SymbolTable table = SymbolTable::for_library(lib);

  if (opts.approach == Approach::EA) {
    SolverResult r = runner.run(query_for(p.name + " ea", build_ea(lib, p, inv), {}, table));
    v.stats.queries = since(runner, start);
    if (r.answer == Answer::Sat) {
      v.kind = VerdictKind::PureCertified;
    } else if (r.answer == Answer::Unsat) {
      v.kind = VerdictKind::NotCertified;
      v.failure = FailureKind::TooWeakToCertify;
    } else {
      v.kind = VerdictKind::Unknown;
      v.reason = unknown_reason(r);
    }
    return v;
  }

  IwFormulas iw = build_iw(lib, p, inv);
  SolverResult nv = runner.run(query_for(p.name + " not-vc", iw.not_vc, iw.not_vc_consts, table));
  SolverResult tw = runner.run(query_for(p.name + " twin", iw.twin, iw.twin_consts, table));
  v.stats.queries = since(runner, start);

  std::optional<Classification> cls;
  if (tw.answer == Answer::Sat) cls = classify_twin_model(lib, p, iw, tw.model, opts);

  if (cls && cls->kind == FailureKind::ImpurityWitness) {
    v.kind = VerdictKind::NotCertified;
    v.failure = FailureKind::ImpurityWitness;
    v.model = model_strings(tw.model);
    v.witness = cls->witness;
    v.note = cls->note;
  } else if (nv.answer == Answer::Sat) {
    v.kind = VerdictKind::NotCertified;
    v.failure = FailureKind::InvariantViolation;
    v.model = model_strings(nv.model);
  } else if (tw.answer == Answer::Sat) {
    v.kind = VerdictKind::NotCertified;
    v.failure = FailureKind::TooWeakToCertify;
    v.model = model_strings(tw.model);
    v.note = cls->note;
  } else if (nv.answer != Answer::Unsat || tw.answer != Answer::Unsat) {
    v.kind = VerdictKind::Unknown;
    v.reason = unknown_reason(nv.answer != Answer::Unsat ? nv : tw);
  } else {
    v.kind = VerdictKind::PureCertified;
  }
  return v;
}

namespace {

std::vector<Verdict> check_all(const Library& lib, const CheckOptions& opts,
                               QueryRunner& runner) {
  std::vector<Verdict> out;
  for (const auto& p : lib.procedures) {
    if (!opts.procedures.empty() &&
        std::find(opts.procedures.begin(), opts.procedures.end(), p.name) ==
            opts.procedures.end())
      continue;
    out.push_back(check_procedure(lib, p, opts, runner));
  }
  return out;
}

}  // namespace

std::vector<Verdict> check_impurity_witness(const Library& lib, const CheckOptions& opts,
                                            QueryRunner& runner) {
  CheckOptions o = opts;
  o.approach = Approach::IW;
  return check_all(lib, o, runner);
}

std::vector<Verdict> check_existential(const Library& lib, const CheckOptions& opts,
                                       QueryRunner& runner) {
  CheckOptions o = opts;
  o.approach = Approach::EA;
  return check_all(lib, o, runner);
}

int exit_code(const std::vector<Verdict>& verdicts) {
  bool unknown = false;
  for (const auto& v : verdicts) {
    if (v.kind == VerdictKind::NotCertified) return 1;
    if (v.kind == VerdictKind::Unknown) unknown = true;
  }
  return unknown ? 2 : 0;
}

}  // namespace opcheck
