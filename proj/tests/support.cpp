#include "support.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "opcheck/arith.hpp"
#include "opcheck/frontend.hpp"
#include "opcheck/transform.hpp"

namespace opcheck::testing {

std::string source_dir() { return OPCHECK_SOURCE_DIR; }
std::string corpus_dir() { return source_dir() + "/corpus"; }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Library load_corpus_file(const std::string& file) {
  Library lib = parse_library(read_file(corpus_dir() + "/" + file));
  auto diags = validate(lib);
  if (!diags.empty()) throw std::runtime_error(file + ": " + to_string(diags[0]));
  return lib;
}

SolverConfig test_solver() { return SolverConfig::from_environment(); }

namespace {

std::string quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'')
      out += "'\\''";
    else
      out += c;
  }
  return out + "'";
}

}  // namespace

CommandResult run_cli(const std::vector<std::string>& args) {
  char err_path[] = "/tmp/opcheck-cli-XXXXXX";
  int fd = ::mkstemp(err_path);
  if (fd < 0) throw std::runtime_error("mkstemp failed");
  ::close(fd);
  std::string cmd = quote(OPCHECK_CLI);
  for (const auto& a : args) cmd += " " + quote(a);
  cmd += " 2>" + quote(err_path);
  CommandResult r;
  FILE* p = ::popen(cmd.c_str(), "r");
  if (!p) throw std::runtime_error("popen failed");
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  int status = ::pclose(p);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = read_file(err_path);
  ::unlink(err_path);
  return r;
}

// ---------------------------------------------------------------------------
// Random terms
// ---------------------------------------------------------------------------

ExprPtr random_expr(std::mt19937_64& rng, int depth, const std::vector<std::string>& vars) {
  auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); };
  if (depth <= 0 || pick(4) == 0) {
    if (pick(2) == 0) return Expr::constant(pick(9) - 4);
    return Expr::var(vars[pick(static_cast<int>(vars.size()))]);
  }
  if (pick(6) == 0)
    return Expr::unary(pick(2) ? UnOp::Neg : UnOp::Not, random_expr(rng, depth - 1, vars));
  static const BinOp ops[] = {BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div, BinOp::Mod,
                              BinOp::Lt,  BinOp::Gt,  BinOp::Le,  BinOp::Ge,  BinOp::Eq,
                              BinOp::Ne,  BinOp::And, BinOp::Or};
  BinOp op = ops[pick(13)];
  return Expr::binary(op, random_expr(rng, depth - 1, vars), random_expr(rng, depth - 1, vars));
}

FormulaPtr random_formula(std::mt19937_64& rng, int depth, const std::vector<std::string>& vars,
                          bool quantifiers) {
  auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); };
  if (depth <= 0 || pick(4) == 0) {
    static const BinOp rel[] = {BinOp::Lt, BinOp::Le, BinOp::Eq, BinOp::Ne, BinOp::Ge};
    return Formula::make_atom(
        Expr::binary(rel[pick(5)], random_expr(rng, 2, vars), random_expr(rng, 2, vars)));
  }
  int choice = pick(quantifiers ? 7 : 5);
  auto sub = [&] { return random_formula(rng, depth - 1, vars, quantifiers); };
  switch (choice) {
    case 0: return Formula::negate(sub());
    case 1: return Formula::conj({sub(), sub()});
    case 2: return Formula::disj({sub(), sub()});
    case 3: return Formula::implies(sub(), sub());
    case 4: return Formula::conj({sub(), sub(), sub()});
    case 5: return Formula::exists({{vars[pick(static_cast<int>(vars.size()))], Sort::Int}}, sub());
    default:
      return Formula::forall({{vars[pick(static_cast<int>(vars.size()))], Sort::Int}}, sub());
  }
}

EvalEnv scalar_env(const std::map<std::string, Int>& values, std::vector<Int> domain) {
  EvalEnv e;
  e.scalar = [values](const std::string& n) -> std::optional<Int> {
    auto it = values.find(n);
    if (it == values.end()) return std::nullopt;
    return it->second;
  };
  e.array = [](const std::string&) -> const ArrayValue* { return nullptr; };
  e.apply = [](const std::string&, const std::vector<Int>&) -> std::optional<Int> {
    return std::nullopt;
  };
  e.domain = std::move(domain);
  e.closed = true;
  return e;
}

// ---------------------------------------------------------------------------
// Transformed-body executor
// ---------------------------------------------------------------------------

namespace {

class TbRunner {
 public:
  TbRunner(const Program& prog, IoTable& table, std::uint64_t fuel, TbExecution& ex)
      : prog_(prog), lib_(prog.library()), table_(table), fuel_(fuel), ex_(ex) {}

  void run(const StmtPtr& s) {
    if (!ok_) return;
    switch (s->kind) {
      case StmtKind::Block:
        for (const auto& b : s->body) run(b);
        return;
      case StmtKind::If: {
        Int c = value(s->value);
        if (!ok_) return;
        ex_.decisions.push_back(c != 0);
        run(s->body[c != 0 ? 0 : 1]);
        return;
      }
      case StmtKind::Assign: {
        Int v = value(s->value);
        if (!ok_) return;
        set_scalar(s->target, v);
        break;
      }
      case StmtKind::ArrayAssign: {
        std::vector<Int> idx;
        for (const auto& i : s->indices) idx.push_back(value(i));
        Int v = value(s->value);
        if (!ok_) return;
        int g = prog_.global_index(s->target);
        ex_.globals.arrays[g].set(idx[0], idx.size() > 1 ? idx[1] : 0, v);
        break;
      }
      case StmtKind::Havoc:
      case StmtKind::Skip:
        break;
      case StmtKind::Assume:
        if (s->origin) call(*s->origin);
        if (!ok_) return;
        check(s->formula, ex_.assumes_checked, ex_.assumes_failed);
        break;
      case StmtKind::Assert:
        check(s->formula, ex_.asserts_checked, ex_.asserts_failed);
        break;
      case StmtKind::Call:
      case StmtKind::Return:
        fail("untransformed statement");
        return;
    }
    observe();
  }

  void observe() {
    for (const auto& [_, v] : ex_.locals) ex_.ints.insert(v);
    for (std::size_t i = 0; i < lib_.globals.size(); ++i) {
      if (lib_.globals[i].kind == VarKind::Scalar) {
        ex_.ints.insert(ex_.globals.scalars[i]);
        continue;
      }
      const ArrayValue& a = ex_.globals.arrays[i];
      ex_.ints.insert(a.fallback);
      for (const auto& [k, v] : a.cells) {
        ex_.ints.insert(k.first);
        ex_.ints.insert(k.second);
        ex_.ints.insert(v);
      }
      if (std::find(ex_.arrays.begin(), ex_.arrays.end(), a) == ex_.arrays.end())
        ex_.arrays.push_back(a);
    }
  }

  bool ok() const { return ok_; }

 private:
  void fail(const std::string& why) {
    if (ok_) ex_.failure = why;
    ok_ = false;
  }

  EvalEnv env() const {
    EvalEnv e;
    e.scalar = [this](const std::string& n) -> std::optional<Int> {
      auto it = ex_.locals.find(n);
      if (it != ex_.locals.end()) return it->second;
      int g = prog_.global_index(n);
      if (g >= 0 && lib_.globals[g].kind == VarKind::Scalar) return ex_.globals.scalars[g];
      if (g < 0) return 0;  // unassigned local
      return std::nullopt;
    };
    e.array = [this](const std::string& n) -> const ArrayValue* {
      int g = prog_.global_index(n);
      if (g < 0 || lib_.globals[g].kind == VarKind::Scalar) return nullptr;
      return &ex_.globals.arrays[g];
    };
    e.apply = [this](const std::string& p, const std::vector<Int>& args) -> std::optional<Int> {
      auto row = table_.find(p);
      if (row == table_.end()) return std::nullopt;
      auto it = row->second.find(args);
      if (it == row->second.end()) return std::nullopt;
      return it->second.result;
    };
    e.domain.assign(ex_.ints.begin(), ex_.ints.end());
    e.array_domain = ex_.arrays;
    e.closed = false;
    return e;
  }

  Int value(const ExprPtr& e) {
    auto v = eval_expr(e, env());
    if (!v) {
      fail("expression could not be evaluated: " + to_string(e));
      return 0;
    }
    return *v;
  }

  void set_scalar(const std::string& name, Int v) {
    int g = prog_.global_index(name);
    if (g >= 0)
      ex_.globals.scalars[g] = v;
    else
      ex_.locals[name] = v;
  }

  void call(const CallOrigin& o) {
    std::vector<Int> args;
    for (const auto& a : o.args) args.push_back(value(Expr::var(a)));
    if (!ok_) return;
    Machine m(prog_);
    m.set_globals(ex_.globals);
    std::vector<TraceRecord> log;
    m.log = &log;
    std::optional<Int> r;
    try {
      r = m.call(prog_.proc_index(o.callee), args, fuel_);
    } catch (const ArithmeticOverflow&) {
      fail("overflow");
      return;
    }
    if (!r) {
      fail("fuel exhausted");
      return;
    }
    ClientRun run;
    run.log = std::move(log);
    record_traces(table_, run, -1, {});
    ex_.globals = m.globals();
    set_scalar(o.lhs, *r);
  }

  void check(const FormulaPtr& f, int& checked, int& failed) {
    Truth t = eval_formula(f, env());
    if (t == Truth::Unknown) return;
    ++checked;
    if (t == Truth::False) ++failed;
  }

  const Program& prog_;
  const Library& lib_;
  IoTable& table_;
  std::uint64_t fuel_;
  TbExecution& ex_;
  bool ok_ = true;
};

}  // namespace

TbExecution execute_tb(const Program& prog, const Procedure& p, const TransformedBody& tb,
                       const GlobalState& start, const std::vector<Int>& args, IoTable& table,
                       std::uint64_t fuel) {
  TbExecution ex;
  ex.globals = start;
  for (std::size_t i = 0; i < p.params.size(); ++i) ex.locals[p.params[i]] = args.at(i);
  TbRunner runner(prog, table, fuel, ex);
  runner.observe();
  runner.run(tb.body);
  ex.completed = runner.ok();
  return ex;
}

EvalEnv final_env(const Library& lib, const TbExecution& ex, const IoTable& table) {
  auto state = std::make_shared<TbExecution>(ex);
  auto tab = std::make_shared<IoTable>(table);
  auto decls = std::make_shared<std::vector<GlobalDecl>>(lib.globals);
  auto index = [decls](const std::string& n) -> int {
    for (std::size_t i = 0; i < decls->size(); ++i)
      if ((*decls)[i].name == n) return static_cast<int>(i);
    return -1;
  };
  EvalEnv e;
  e.scalar = [state, decls, index](const std::string& n) -> std::optional<Int> {
    auto it = state->locals.find(n);
    if (it != state->locals.end()) return it->second;
    int g = index(n);
    if (g >= 0 && (*decls)[g].kind == VarKind::Scalar) return state->globals.scalars[g];
    if (g < 0) return 0;
    return std::nullopt;
  };
  e.array = [state, decls, index](const std::string& n) -> const ArrayValue* {
    int g = index(n);
    if (g < 0 || (*decls)[g].kind == VarKind::Scalar) return nullptr;
    return &state->globals.arrays[g];
  };
  e.apply = [tab](const std::string& p, const std::vector<Int>& args) -> std::optional<Int> {
    auto row = tab->find(p);
    if (row == tab->end()) return std::nullopt;
    auto it = row->second.find(args);
    if (it == row->second.end()) return std::nullopt;
    return it->second.result;
  };
  std::set<Int> dom = ex.ints;
  for (const auto& [p, row] : table)
    for (const auto& [args, entry] : row) {
      dom.insert(args.begin(), args.end());
      dom.insert(entry.result);
    }
  e.domain.assign(dom.begin(), dom.end());
  e.array_domain = ex.arrays;
  e.closed = true;
  return e;
}

int matching_path(const PostVcResult& pv, const TbExecution& ex) {
  for (std::size_t i = 0; i < pv.paths.size(); ++i)
    if (pv.paths[i].decisions == ex.decisions) return static_cast<int>(i);
  return -1;
}

PostSoundness check_post_soundness(const Library& lib, const std::string& proc, int envs,
                                   std::uint64_t seed) {
  constexpr std::uint64_t kFuel = 1000000;
  constexpr Int kMaxArg = 12;
  Program prog(lib);
  const Procedure& p = *lib.find_procedure(proc);
  FormulaPtr pre = effective_invariant(p);
  PostVcResult pv = postvc(lib, p, pre);
  std::mt19937_64 rng(seed);
  auto arg = [&] { return static_cast<Int>(rng() % (2 * kMaxArg + 1)) - kMaxArg; };

  PostSoundness out;
  for (int i = 0; i < envs; ++i) {
    ++out.envs;
    // Reachable start state: a short random client prefix.
    Machine m(prog);
    m.reset_globals();
    std::vector<TraceRecord> log;
    m.log = &log;
    bool ok = true;
    int prefix = static_cast<int>(rng() % 4);
    for (int k = 0; k < prefix && ok; ++k) {
      const Procedure& q = lib.procedures[rng() % lib.procedures.size()];
      std::vector<Int> args;
      for (std::size_t a = 0; a < q.params.size(); ++a) args.push_back(arg());
      m.top_level_index = k;
      try {
        ok = m.call(prog.proc_index(q.name), args, kFuel).has_value();
      } catch (const ArithmeticOverflow&) {
        ok = false;
      }
    }
    std::vector<Int> args;
    for (std::size_t a = 0; a < p.params.size(); ++a) args.push_back(arg());
    if (!ok) continue;
    IoTable table;
    ClientRun run;
    run.log = log;
    record_traces(table, run, 0, {});
    GlobalState start = m.globals();
    if (eval_formula(pre, make_env(lib, start, table)) != Truth::True) continue;

    TbExecution ex = execute_tb(prog, p, pv.tb, start, args, table, kFuel);
    if (!ex.completed) continue;
    int path = matching_path(pv, ex);
    if (path < 0) {
      out.failures.push_back("env " + std::to_string(i) + ": no path matches the run");
      continue;
    }
    const FormulaPtr& f = pv.paths[path].formula;
    Truth t = eval_formula(f, final_env(lib, ex, table));
    if (t == Truth::Unknown) continue;
    ++out.conclusive;
    if (t == Truth::True)
      ++out.passed;
    else
      out.failures.push_back("env " + std::to_string(i) + ": path " + std::to_string(path) +
                             " formula false: " + to_string(f));

    TbExecution bad = ex;
    bad.locals[pv.tb.result_var] += 1;
    Truth n = eval_formula(f, final_env(lib, bad, table));
    if (n != Truth::Unknown) {
      ++out.negatives;
      if (n == Truth::False) ++out.rejected;
    }
  }
  return out;
}

}  // namespace opcheck::testing
