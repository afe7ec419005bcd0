#include "opcheck/interp.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <stdexcept>

#include "opcheck/arith.hpp"

namespace opcheck {

const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Completed: return "completed";
    case RunStatus::FuelExhausted: return "fuel-exhausted";
    case RunStatus::Overflow: return "overflow";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Compiled program
// ---------------------------------------------------------------------------

namespace {

struct CExpr {
  ExprKind kind = ExprKind::Const;
  UnOp unop = UnOp::Not;
  BinOp binop = BinOp::Add;
  Int value = 0;
  int slot = -1;
  bool global = false;
  std::vector<CExpr> args;
};

struct CStmt {
  StmtKind kind = StmtKind::Skip;
  int target = -1;
  bool target_global = false;
  int callee = -1;
  CExpr value;
  std::vector<CExpr> args;  // indices of ArrayAssign, arguments of Call
  std::vector<CStmt> body;
  const Stmt* source = nullptr;
};

struct CProc {
  std::string name;
  int arity = 0;
  int ret_slot = -1;
  std::vector<std::string> slot_names;
  std::map<std::string, int> slots;
  CStmt body;
};

}  // namespace

struct Program::Impl {
  std::vector<CProc> procs;
  std::map<std::string, int> proc_ids;
  std::map<std::string, int> global_ids;
  GlobalState init;
};

namespace {

class Compiler {
 public:
  Compiler(const Library& lib, Program::Impl& impl) : lib_(lib), impl_(impl) {}

  void compile_proc(const Procedure& p, CProc& out) {
    cur_ = &out;
    out.name = p.name;
    out.arity = static_cast<int>(p.params.size());
    for (const auto& f : p.params) slot(f);
    out.body = stmt(*p.body);
    out.ret_slot = slot(p.return_var());
  }

 private:
  int slot(const std::string& name) {
    auto it = cur_->slots.find(name);
    if (it != cur_->slots.end()) return it->second;
    int s = static_cast<int>(cur_->slot_names.size());
    cur_->slots[name] = s;
    cur_->slot_names.push_back(name);
    return s;
  }

  void resolve(const std::string& name, int& slot_out, bool& global_out) {
    auto g = impl_.global_ids.find(name);
    if (g != impl_.global_ids.end()) {
      slot_out = g->second;
      global_out = true;
    } else {
      slot_out = slot(name);
      global_out = false;
    }
  }

  CExpr expr(const Expr& e) {
    CExpr c;
    c.kind = e.kind;
    c.unop = e.unop;
    c.binop = e.binop;
    c.value = e.value;
    switch (e.kind) {
      case ExprKind::Const: break;
      case ExprKind::Var: resolve(e.name, c.slot, c.global); break;
      case ExprKind::Select: resolve(e.name, c.slot, c.global); break;
      case ExprKind::Unary:
      case ExprKind::Binary: break;
      case ExprKind::Store:
      case ExprKind::Apply:
        throw std::invalid_argument("formula-only expression in executable code");
    }
    for (const auto& a : e.args) c.args.push_back(expr(*a));
    return c;
  }

  CStmt stmt(const Stmt& s) {
    CStmt c;
    c.kind = s.kind;
    c.source = &s;
    switch (s.kind) {
      case StmtKind::Assign:
        resolve(s.target, c.target, c.target_global);
        c.value = expr(*s.value);
        break;
      case StmtKind::ArrayAssign:
        resolve(s.target, c.target, c.target_global);
        for (const auto& i : s.indices) c.args.push_back(expr(*i));
        c.value = expr(*s.value);
        break;
      case StmtKind::Call: {
        resolve(s.target, c.target, c.target_global);
        auto it = impl_.proc_ids.find(s.callee);
        if (it == impl_.proc_ids.end())
          throw std::invalid_argument("call to undeclared procedure " + s.callee);
        c.callee = it->second;
        for (const auto& a : s.args) c.args.push_back(expr(*a));
        break;
      }
      case StmtKind::Block:
        for (const auto& b : s.body) c.body.push_back(stmt(*b));
        break;
      case StmtKind::If:
        c.value = expr(*s.value);
        c.body.push_back(stmt(*s.body[0]));
        c.body.push_back(stmt(*s.body[1]));
        break;
      case StmtKind::Return:
        resolve(s.target, c.target, c.target_global);
        break;
      case StmtKind::Skip:
        break;
      case StmtKind::Havoc:
      case StmtKind::Assume:
      case StmtKind::Assert:
        throw std::invalid_argument("verification statement in executable code");
    }
    return c;
  }

  const Library& lib_;
  Program::Impl& impl_;
  CProc* cur_ = nullptr;
};

}  // namespace

Program::Program(const Library& lib) : lib_(lib), impl_(std::make_unique<Impl>()) {
  auto& im = *impl_;
  for (std::size_t i = 0; i < lib_.globals.size(); ++i) {
    const auto& g = lib_.globals[i];
    im.global_ids[g.name] = static_cast<int>(i);
    im.init.scalars.push_back(g.kind == VarKind::Scalar ? g.init : 0);
    ArrayValue a;
    if (g.kind != VarKind::Scalar) a.fallback = g.init;
    im.init.arrays.push_back(a);
  }
  for (std::size_t i = 0; i < lib_.procedures.size(); ++i)
    im.proc_ids[lib_.procedures[i].name] = static_cast<int>(i);
  im.procs.resize(lib_.procedures.size());
  Compiler comp(lib_, im);
  for (std::size_t i = 0; i < lib_.procedures.size(); ++i)
    comp.compile_proc(lib_.procedures[i], im.procs[i]);
}

Program::~Program() = default;

int Program::proc_index(const std::string& name) const {
  auto it = impl_->proc_ids.find(name);
  return it == impl_->proc_ids.end() ? -1 : it->second;
}

int Program::global_index(const std::string& name) const {
  auto it = impl_->global_ids.find(name);
  return it == impl_->global_ids.end() ? -1 : it->second;
}

GlobalState Program::initial_globals() const { return impl_->init; }

// ---------------------------------------------------------------------------
// Machine
// ---------------------------------------------------------------------------

struct Machine::Frame {
  int proc = -1;
  std::vector<const CStmt*> cont;  // back() runs next
  std::vector<Int> locals;
  int trace = -1;
};

Machine::Machine(const Program& prog) : prog_(prog), globals_(prog.initial_globals()) {}
Machine::~Machine() = default;

void Machine::reset_globals() { globals_ = prog_.initial_globals(); }
bool Machine::idle() const { return stack_.empty(); }
std::size_t Machine::depth() const { return stack_.size(); }

namespace {

Int eval_c(const CExpr& e, const std::vector<Int>& locals, const GlobalState& g) {
  switch (e.kind) {
    case ExprKind::Const:
      return e.value;
    case ExprKind::Var:
      return e.global ? g.scalars[e.slot] : locals[e.slot];
    case ExprKind::Select: {
      Int i = eval_c(e.args[0], locals, g);
      Int j = e.args.size() > 1 ? eval_c(e.args[1], locals, g) : 0;
      return g.arrays[e.slot].get(i, j);
    }
    case ExprKind::Unary:
      return eval_unop(e.unop, eval_c(e.args[0], locals, g));
    case ExprKind::Binary: {
      Int a = eval_c(e.args[0], locals, g);
      // Short-circuit matches the boolean reading; both sides are pure.
      if (e.binop == BinOp::And && a == 0) return 0;
      if (e.binop == BinOp::Or && a != 0) return 1;
      return eval_binop(e.binop, a, eval_c(e.args[1], locals, g));
    }
    default:
      break;
  }
  throw std::logic_error("unexpected compiled expression");
}

}  // namespace

void Machine::begin_call(int proc, const std::vector<Int>& args) {
  if (!stack_.empty()) throw std::logic_error("begin_call on a busy machine");
  const auto& cp = prog_.impl().procs.at(proc);
  if (static_cast<int>(args.size()) != cp.arity)
    throw std::invalid_argument("wrong number of arguments for " + cp.name);
  Frame f;
  f.proc = proc;
  f.locals.assign(cp.slot_names.size(), 0);
  std::copy(args.begin(), args.end(), f.locals.begin());
  f.cont.push_back(&cp.body);
  if (log) {
    TraceRecord t;
    t.proc = cp.name;
    t.args = args;
    t.depth = 0;
    t.top_level = top_level_index;
    if (snapshots) t.entry = globals_;
    f.trace = static_cast<int>(log->size());
    log->push_back(std::move(t));
  }
  stack_.push_back(std::move(f));
}

std::optional<Int> Machine::step() {
  if (stack_.empty()) throw std::logic_error("step on an idle machine");
  Frame& fr = stack_.back();
  if (fr.cont.empty()) throw std::logic_error("frame without a return statement");
  const CStmt* s = fr.cont.back();
  switch (s->kind) {
    case StmtKind::Assign: {
      Int v = eval_c(s->value, fr.locals, globals_);
      (s->target_global ? globals_.scalars[s->target] : fr.locals[s->target]) = v;
      fr.cont.pop_back();
      break;
    }
    case StmtKind::ArrayAssign: {
      Int i = eval_c(s->args[0], fr.locals, globals_);
      Int j = s->args.size() > 1 ? eval_c(s->args[1], fr.locals, globals_) : 0;
      Int v = eval_c(s->value, fr.locals, globals_);
      globals_.arrays[s->target].set(i, j, v);
      fr.cont.pop_back();
      break;
    }
    case StmtKind::Block:
      fr.cont.pop_back();
      for (auto it = s->body.rbegin(); it != s->body.rend(); ++it) fr.cont.push_back(&*it);
      break;
    case StmtKind::If: {
      Int c = eval_c(s->value, fr.locals, globals_);
      fr.cont.pop_back();
      fr.cont.push_back(&s->body[c != 0 ? 0 : 1]);
      break;
    }
    case StmtKind::Skip:
      fr.cont.pop_back();
      break;
    case StmtKind::Call: {
      // The Call stays on the caller's continuation until the callee returns.
      const auto& cp = prog_.impl().procs[s->callee];
      Frame nf;
      nf.proc = s->callee;
      nf.locals.assign(cp.slot_names.size(), 0);
      for (std::size_t k = 0; k < s->args.size(); ++k)
        nf.locals[k] = eval_c(s->args[k], fr.locals, globals_);
      nf.cont.push_back(&cp.body);
      if (log) {
        TraceRecord t;
        t.proc = cp.name;
        t.args.assign(nf.locals.begin(), nf.locals.begin() + cp.arity);
        t.depth = static_cast<int>(stack_.size());
        t.parent = fr.trace;
        t.top_level = top_level_index;
        if (snapshots) t.entry = globals_;
        nf.trace = static_cast<int>(log->size());
        log->push_back(std::move(t));
      }
      stack_.push_back(std::move(nf));
      break;
    }
    case StmtKind::Return: {
      Int r = s->target_global ? globals_.scalars[s->target] : fr.locals[s->target];
      if (log && fr.trace >= 0) {
        auto& t = (*log)[fr.trace];
        t.result = r;
        if (snapshots) t.exit = globals_;
      }
      stack_.pop_back();
      if (stack_.empty()) return r;
      Frame& caller = stack_.back();
      const CStmt* call = caller.cont.back();
      (call->target_global ? globals_.scalars[call->target] : caller.locals[call->target]) = r;
      caller.cont.pop_back();
      break;
    }
    default:
      throw std::logic_error("unexpected statement");
  }
  return std::nullopt;
}

std::optional<Int> Machine::local(const std::string& name) const {
  if (stack_.empty()) return std::nullopt;
  const Frame& fr = stack_.back();
  const auto& cp = prog_.impl().procs[fr.proc];
  auto it = cp.slots.find(name);
  if (it == cp.slots.end()) return std::nullopt;
  return fr.locals[it->second];
}

std::optional<Int> Machine::global_scalar(const std::string& name) const {
  int i = prog_.global_index(name);
  if (i < 0 || prog_.library().globals[i].kind != VarKind::Scalar) return std::nullopt;
  return globals_.scalars[i];
}

const Stmt* Machine::next_statement() const {
  if (stack_.empty() || stack_.back().cont.empty()) return nullptr;
  return stack_.back().cont.back()->source;
}

std::optional<Int> Machine::call(int proc, const std::vector<Int>& args, std::uint64_t fuel) {
  begin_call(proc, args);
  for (std::uint64_t used = 0; used < fuel; ++used) {
    try {
      if (auto r = step()) return r;
    } catch (...) {
      stack_.clear();
      throw;
    }
  }
  stack_.clear();
  return std::nullopt;
}

ClientRun run_client(const Program& prog, const CallSeq& calls, std::uint64_t fuel,
                     bool snapshots) {
  ClientRun run;
  Machine m(prog);
  m.log = &run.log;
  m.snapshots = snapshots;
  for (std::size_t i = 0; i < calls.size(); ++i) {
    int p = prog.proc_index(calls[i].first);
    if (p < 0) throw std::invalid_argument("unknown procedure " + calls[i].first);
    m.top_level_index = static_cast<int>(i);
    try {
      auto r = m.call(p, calls[i].second, fuel);
      if (!r) {
        run.status = RunStatus::FuelExhausted;
        return run;
      }
      run.results.push_back(*r);
    } catch (const ArithmeticOverflow&) {
      run.status = RunStatus::Overflow;
      return run;
    }
  }
  return run;
}

ClientRun run_client(const Library& lib, const CallSeq& calls, std::uint64_t fuel,
                     bool snapshots) {
  Program prog(lib);
  return run_client(prog, calls, fuel, snapshots);
}

// ---------------------------------------------------------------------------
// Oracle
// ---------------------------------------------------------------------------

namespace {

CallSeq prefix(const CallSeq& s, int n) {
  return CallSeq(s.begin(), s.begin() + std::min<std::size_t>(s.size(), n + 1));
}

}  // namespace

std::optional<Witness> record_traces(IoTable& table, const ClientRun& run, int seq,
                                     const std::vector<CallSeq>& history) {
  for (const auto& t : run.log) {
    if (!t.result) continue;
    auto& row = table[t.proc];
    auto [it, inserted] = row.try_emplace(t.args, IoEntry{*t.result, seq, t.top_level});
    if (inserted || it->second.result == *t.result) continue;
    Witness w;
    w.proc = t.proc;
    w.args = t.args;
    w.first = it->second.result;
    w.second = *t.result;
    if (it->second.sequence >= 0 && it->second.sequence < static_cast<int>(history.size()))
      w.first_sequence = prefix(history[it->second.sequence], it->second.call);
    if (seq >= 0 && seq < static_cast<int>(history.size()))
      w.second_sequence = prefix(history[seq], t.top_level);
    return w;
  }
  return std::nullopt;
}

OracleResult oracle_purity(const Program& prog, const OracleConfig& cfg) {
  OracleResult res;
  const Library& lib = prog.library();
  std::vector<int> candidates;
  if (cfg.procedures.empty()) {
    for (std::size_t i = 0; i < lib.procedures.size(); ++i)
      candidates.push_back(static_cast<int>(i));
  } else {
    for (const auto& n : cfg.procedures) {
      int i = prog.proc_index(n);
      if (i < 0) throw std::invalid_argument("unknown procedure " + n);
      candidates.push_back(i);
    }
  }
  if (candidates.empty()) return res;

  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<int> length(cfg.min_length, cfg.max_length);
  std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
  std::uniform_int_distribution<Int> arg(-cfg.max_arg, cfg.max_arg);
  std::bernoulli_distribution reuse(0.5);

  Machine m(prog);
  std::vector<TraceRecord> log;
  m.log = &log;

  for (int trial = 0; trial < cfg.trials; ++trial) {
    CallSeq seq;
    int len = length(rng);
    for (int c = 0; c < len; ++c) {
      int p = candidates[pick(rng)];
      const auto& proc = lib.procedures[p];
      std::vector<const std::vector<Int>*> earlier;
      for (const auto& [name, args] : seq)
        if (name == proc.name) earlier.push_back(&args);
      std::vector<Int> args;
      if (!earlier.empty() && reuse(rng)) {
        std::uniform_int_distribution<std::size_t> which(0, earlier.size() - 1);
        args = *earlier[which(rng)];
      } else {
        for (std::size_t k = 0; k < proc.params.size(); ++k) args.push_back(arg(rng));
      }
      seq.emplace_back(proc.name, std::move(args));
    }
    res.history.push_back(seq);
    ++res.sequences;

    ClientRun run;
    log.clear();
    m.reset_globals();
    std::vector<GlobalState> seen;
    for (std::size_t c = 0; c < seq.size(); ++c) {
      m.top_level_index = static_cast<int>(c);
      try {
        auto r = m.call(prog.proc_index(seq[c].first), seq[c].second, cfg.fuel);
        if (!r) {
          run.status = RunStatus::FuelExhausted;
          break;
        }
        run.results.push_back(*r);
        ++res.calls;
      } catch (const ArithmeticOverflow&) {
        run.status = RunStatus::Overflow;
        break;
      }
      if (res.states.size() < cfg.collect_states) seen.push_back(m.globals());
    }
    if (run.status != RunStatus::Completed) {
      ++res.skipped;
      continue;
    }
    for (auto& g : seen) {
      if (res.states.size() >= cfg.collect_states) break;
      if (std::find(res.states.begin(), res.states.end(), g) == res.states.end())
        res.states.push_back(std::move(g));
    }
    run.log = std::move(log);
    auto w = record_traces(res.table, run, trial, res.history);
    log = std::move(run.log);
    if (w) {
      res.witness = std::move(w);
      break;
    }
  }
  return res;
}

OracleResult oracle_purity(const Library& lib, const OracleConfig& cfg) {
  Program prog(lib);
  return oracle_purity(prog, cfg);
}

// ---------------------------------------------------------------------------
// Formula evaluation
// ---------------------------------------------------------------------------

namespace {

Truth truth_of(bool b) { return b ? Truth::True : Truth::False; }

class Evaluator {
 public:
  explicit Evaluator(const EvalEnv& env) : env_(env) {}

  Truth formula(const Formula& f) {
    switch (f.kind) {
      case FormulaKind::True: return Truth::True;
      case FormulaKind::False: return Truth::False;
      case FormulaKind::Atom: {
        auto v = expr(*f.atom);
        return v ? truth_of(*v != 0) : Truth::Unknown;
      }
      case FormulaKind::Not: {
        Truth t = formula(*f.kids[0]);
        if (t == Truth::Unknown) return t;
        return truth_of(t == Truth::False);
      }
      case FormulaKind::And: {
        bool unknown = false;
        for (const auto& k : f.kids) {
          Truth t = formula(*k);
          if (t == Truth::False) return t;
          if (t == Truth::Unknown) unknown = true;
        }
        return unknown ? Truth::Unknown : Truth::True;
      }
      case FormulaKind::Or: {
        bool unknown = false;
        for (const auto& k : f.kids) {
          Truth t = formula(*k);
          if (t == Truth::True) return t;
          if (t == Truth::Unknown) unknown = true;
        }
        return unknown ? Truth::Unknown : Truth::False;
      }
      case FormulaKind::Implies: {
        Truth a = formula(*f.kids[0]);
        if (a == Truth::False) return Truth::True;
        Truth b = formula(*f.kids[1]);
        if (b == Truth::True) return b;
        if (a == Truth::Unknown || b == Truth::Unknown) return Truth::Unknown;
        return Truth::False;
      }
      case FormulaKind::Exists:
      case FormulaKind::Forall:
        return quantifier(f, 0);
    }
    return Truth::Unknown;
  }

  std::optional<Int> expr(const Expr& e) {
    try {
      return expr_or_throw(e);
    } catch (const ArithmeticOverflow&) {
      return std::nullopt;
    }
  }

 private:
  Truth quantifier(const Formula& f, std::size_t i) {
    if (i == f.vars.size()) return formula(*f.kids[0]);
    const auto& v = f.vars[i];
    bool exists = f.kind == FormulaKind::Exists;
    bool unknown = false;
    bool decided = false;
    auto visit = [&](Truth t) {
      if (t == Truth::Unknown) unknown = true;
      if ((exists && t == Truth::True) || (!exists && t == Truth::False)) decided = true;
      return decided;
    };
    if (v.sort == Sort::Int) {
      auto saved = bound_.find(v.name);
      std::optional<Int> old = saved != bound_.end() ? std::optional<Int>(saved->second)
                                                     : std::nullopt;
      auto shadow = bound_arrays_.find(v.name);
      std::optional<const ArrayValue*> old_arr;
      if (shadow != bound_arrays_.end()) {
        old_arr = shadow->second;
        bound_arrays_.erase(shadow);
      }
      for (Int d : env_.domain) {
        bound_[v.name] = d;
        if (visit(quantifier(f, i + 1))) break;
      }
      if (old)
        bound_[v.name] = *old;
      else
        bound_.erase(v.name);
      if (old_arr) bound_arrays_[v.name] = *old_arr;
    } else {
      auto saved = bound_arrays_.find(v.name);
      std::optional<const ArrayValue*> old =
          saved != bound_arrays_.end() ? std::optional<const ArrayValue*>(saved->second)
                                       : std::nullopt;
      auto shadow = bound_.find(v.name);
      std::optional<Int> old_int;
      if (shadow != bound_.end()) {
        old_int = shadow->second;
        bound_.erase(shadow);
      }
      for (const auto& a : env_.array_domain) {
        bound_arrays_[v.name] = &a;
        if (visit(quantifier(f, i + 1))) break;
      }
      if (old)
        bound_arrays_[v.name] = *old;
      else
        bound_arrays_.erase(v.name);
      if (old_int) bound_[v.name] = *old_int;
    }
    if (decided) return exists ? Truth::True : Truth::False;
    if (unknown || !env_.closed) return Truth::Unknown;
    return exists ? Truth::False : Truth::True;
  }

  std::optional<Int> scalar(const std::string& name) {
    auto it = bound_.find(name);
    if (it != bound_.end()) return it->second;
    if (bound_arrays_.count(name)) return std::nullopt;
    return env_.scalar ? env_.scalar(name) : std::nullopt;
  }

  const ArrayValue* array(const std::string& name) {
    auto it = bound_arrays_.find(name);
    if (it != bound_arrays_.end()) return it->second;
    if (bound_.count(name)) return nullptr;
    return env_.array ? env_.array(name) : nullptr;
  }

  bool is_array_valued(const Expr& e) {
    if (e.kind == ExprKind::Store) return true;
    return e.kind == ExprKind::Var && array(e.name) != nullptr;
  }

  std::optional<ArrayValue> array_value(const Expr& e) {
    if (e.kind == ExprKind::Var) {
      const ArrayValue* a = array(e.name);
      if (!a) return std::nullopt;
      return *a;
    }
    // Store: name[args[0..n-1)] := args.back()
    const ArrayValue* base = array(e.name);
    if (!base) return std::nullopt;
    ArrayValue out = *base;
    std::vector<Int> vals;
    for (const auto& a : e.args) {
      auto v = expr_or_throw(*a);
      if (!v) return std::nullopt;
      vals.push_back(*v);
    }
    Int j = vals.size() > 2 ? vals[1] : 0;
    out.set(vals[0], j, vals.back());
    return out;
  }

  std::optional<Int> expr_or_throw(const Expr& e) {
    switch (e.kind) {
      case ExprKind::Const:
        return e.value;
      case ExprKind::Var:
        return scalar(e.name);
      case ExprKind::Select: {
        const ArrayValue* a = array(e.name);
        if (!a) return std::nullopt;
        std::vector<Int> idx;
        for (const auto& i : e.args) {
          auto v = expr_or_throw(*i);
          if (!v) return std::nullopt;
          idx.push_back(*v);
        }
        return a->get(idx[0], idx.size() > 1 ? idx[1] : 0);
      }
      case ExprKind::Store:
        return std::nullopt;
      case ExprKind::Apply: {
        std::vector<Int> args;
        for (const auto& a : e.args) {
          auto v = expr_or_throw(*a);
          if (!v) return std::nullopt;
          args.push_back(*v);
        }
        return env_.apply ? env_.apply(e.name, args) : std::nullopt;
      }
      case ExprKind::Unary: {
        auto v = expr_or_throw(*e.args[0]);
        if (!v) return std::nullopt;
        return eval_unop(e.unop, *v);
      }
      case ExprKind::Binary: {
        if ((e.binop == BinOp::Eq || e.binop == BinOp::Ne) &&
            (is_array_valued(*e.args[0]) || is_array_valued(*e.args[1]))) {
          auto a = array_value(*e.args[0]);
          auto b = array_value(*e.args[1]);
          if (!a || !b) return std::nullopt;
          bool same = *a == *b;
          return (e.binop == BinOp::Eq) == same ? 1 : 0;
        }
        auto a = expr_or_throw(*e.args[0]);
        if (e.binop == BinOp::And && a && *a == 0) return 0;
        if (e.binop == BinOp::Or && a && *a != 0) return 1;
        auto b = expr_or_throw(*e.args[1]);
        if (e.binop == BinOp::And && b && *b == 0) return 0;
        if (e.binop == BinOp::Or && b && *b != 0) return 1;
        if (!a || !b) return std::nullopt;
        return eval_binop(e.binop, *a, *b);
      }
    }
    return std::nullopt;
  }

  const EvalEnv& env_;
  std::map<std::string, Int> bound_;
  std::map<std::string, const ArrayValue*> bound_arrays_;
};

}  // namespace

Truth eval_formula(const FormulaPtr& f, const EvalEnv& env) {
  return Evaluator(env).formula(*f);
}

std::optional<Int> eval_expr(const ExprPtr& e, const EvalEnv& env) {
  return Evaluator(env).expr(*e);
}

EvalEnv make_env(const Library& lib, const GlobalState& g, const IoTable& table,
                 const std::map<std::string, Int>& locals) {
  std::map<std::string, std::size_t> ids;
  for (std::size_t i = 0; i < lib.globals.size(); ++i) ids[lib.globals[i].name] = i;
  auto state = std::make_shared<GlobalState>(g);
  auto decls = std::make_shared<std::vector<GlobalDecl>>(lib.globals);
  auto id_map = std::make_shared<std::map<std::string, std::size_t>>(std::move(ids));
  auto local_map = std::make_shared<std::map<std::string, Int>>(locals);
  auto tab = std::make_shared<IoTable>(table);

  EvalEnv env;
  env.scalar = [=](const std::string& n) -> std::optional<Int> {
    auto l = local_map->find(n);
    if (l != local_map->end()) return l->second;
    auto it = id_map->find(n);
    if (it == id_map->end() || (*decls)[it->second].kind != VarKind::Scalar)
      return std::nullopt;
    return state->scalars[it->second];
  };
  env.array = [=](const std::string& n) -> const ArrayValue* {
    auto it = id_map->find(n);
    if (it == id_map->end() || (*decls)[it->second].kind == VarKind::Scalar) return nullptr;
    return &state->arrays[it->second];
  };
  env.apply = [=](const std::string& p, const std::vector<Int>& args) -> std::optional<Int> {
    auto row = tab->find(p);
    if (row == tab->end()) return std::nullopt;
    auto it = row->second.find(args);
    if (it == row->second.end()) return std::nullopt;
    return it->second.result;
  };

  std::set<Int> dom;
  for (Int i = -3; i <= 3; ++i) dom.insert(i);
  for (const auto& [p, row] : table)
    for (const auto& [args, _] : row) dom.insert(args.begin(), args.end());
  for (std::size_t i = 0; i < g.arrays.size() && i < lib.globals.size(); ++i) {
    if (lib.globals[i].kind == VarKind::Scalar) continue;
    for (const auto& [key, _] : g.arrays[i].cells) {
      dom.insert(key.first);
      dom.insert(key.second);
    }
  }
  for (const auto& [_, v] : locals) dom.insert(v);
  env.domain.assign(dom.begin(), dom.end());
  env.closed = false;
  return env;
}

std::vector<InvariantViolation> check_invariant_on_run(const Library& lib,
                                                       const std::string& proc,
                                                       const FormulaPtr& inv,
                                                       const ClientRun& run,
                                                       const IoTable& table) {
  std::vector<InvariantViolation> out;
  if (!inv) return out;
  for (std::size_t i = 0; i < run.log.size(); ++i) {
    const auto& t = run.log[i];
    if (t.proc != proc) continue;
    if (t.entry && eval_formula(inv, make_env(lib, *t.entry, table)) == Truth::False)
      out.push_back({proc, static_cast<int>(i), true});
    if (t.exit && eval_formula(inv, make_env(lib, *t.exit, table)) == Truth::False)
      out.push_back({proc, static_cast<int>(i), false});
  }
  return out;
}

}  // namespace opcheck
