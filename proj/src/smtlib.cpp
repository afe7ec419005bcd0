#include "opcheck/smtlib.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <set>
#include <sstream>

namespace opcheck {

// ---------------------------------------------------------------------------
// Symbols
// ---------------------------------------------------------------------------

SymbolTable SymbolTable::for_library(const Library& lib) {
  SymbolTable t;
  for (const auto& g : lib.globals) t.sorts[g.name] = sort_of(g.kind);
  for (const auto& p : lib.procedures) t.arities[p.name] = static_cast<int>(p.params.size());
  return t;
}

Sort SymbolTable::sort(const std::string& name) const {
  if (auto it = sorts.find(name); it != sorts.end()) return it->second;
  if (auto it = sorts.find(base_name(name)); it != sorts.end()) return it->second;
  return Sort::Int;
}

std::string smt_sort(Sort s) {
  switch (s) {
    case Sort::Int: return "Int";
    case Sort::Array1: return "(Array Int Int)";
    case Sort::Array2: return "(Array Int (Array Int Int))";
  }
  return "Int";
}

std::string smt_symbol(const std::string& name) {
  static const std::set<std::string> reserved = {
      "and", "or", "not", "xor", "=>", "ite", "distinct", "true", "false", "select", "store",
      "div", "mod", "rem", "abs", "exists", "forall", "let", "par", "as", "Int", "Bool",
      "Real", "Array", "to_real", "to_int", "is_int", "assert", "model", "lambda", "match",
      "push", "pop", "echo", "exit", "declare-fun", "define-fun", "declare-const", "const",
      "NUMERAL", "DECIMAL", "STRING", "BINARY", "HEXADECIMAL", "unsat", "sat", "unknown"};
  if (reserved.count(name)) return "|" + name + "|";
  return name;
}

// ---------------------------------------------------------------------------
// Terms
// ---------------------------------------------------------------------------

namespace {

std::string numeral(Int v) {
  if (v >= 0) return std::to_string(v);
  unsigned long long mag = 0ULL - static_cast<unsigned long long>(v);
  return "(- " + std::to_string(mag) + ")";
}

std::string bool_term(const ExprPtr& e);

std::string array_read(const std::string& array, const std::vector<ExprPtr>& idx,
                       std::size_t count) {
  std::string out = array;
  for (std::size_t i = 0; i < count; ++i)
    out = "(select " + out + " " + smt_int_term(idx[i]) + ")";
  return out;
}

std::string int_term(const ExprPtr& e) {
  switch (e->kind) {
    case ExprKind::Const:
      return numeral(e->value);
    case ExprKind::Var:
      return smt_symbol(e->name);
    case ExprKind::Select:
      return array_read(smt_symbol(e->name), e->args, e->args.size());
    case ExprKind::Store: {
      const std::string a = smt_symbol(e->name);
      std::size_t n = e->args.size() - 1;
      std::string value = int_term(e->args.back());
      if (n == 1) return "(store " + a + " " + int_term(e->args[0]) + " " + value + ")";
      std::string i = int_term(e->args[0]);
      std::string row = "(select " + a + " " + i + ")";
      return "(store " + a + " " + i + " (store " + row + " " + int_term(e->args[1]) + " " +
             value + "))";
    }
    case ExprKind::Apply: {
      if (e->args.empty()) return smt_symbol(e->name);
      std::string out = "(" + smt_symbol(e->name);
      for (const auto& a : e->args) out += " " + int_term(a);
      return out + ")";
    }
    case ExprKind::Unary:
      if (e->unop == UnOp::Neg) return "(- " + int_term(e->args[0]) + ")";
      return "(ite " + bool_term(e) + " 1 0)";
    case ExprKind::Binary: {
      const std::string l = int_term(e->args[0]);
      const std::string r = int_term(e->args[1]);
      switch (e->binop) {
        case BinOp::Add: return "(+ " + l + " " + r + ")";
        case BinOp::Sub: return "(- " + l + " " + r + ")";
        case BinOp::Mul: return "(* " + l + " " + r + ")";
        case BinOp::Div:
        case BinOp::Mod: {
          const char* op = e->binop == BinOp::Div ? "div" : "mod";
          const auto& d = e->args[1];
          if (d->kind == ExprKind::Const && d->value != 0)
            return std::string("(") + op + " " + l + " " + r + ")";
          return "(ite (= " + r + " 0) 0 (" + op + " " + l + " " + r + "))";
        }
        default:
          return "(ite " + bool_term(e) + " 1 0)";
      }
    }
  }
  return "0";
}

std::string bool_term(const ExprPtr& e) {
  if (e->kind == ExprKind::Unary && e->unop == UnOp::Not)
    return "(not " + bool_term(e->args[0]) + ")";
  if (e->kind == ExprKind::Binary) {
    auto two = [&](const char* op) {
      return std::string("(") + op + " " + int_term(e->args[0]) + " " + int_term(e->args[1]) +
             ")";
    };
    switch (e->binop) {
      case BinOp::Eq: {
        // Array equations come from the array-assignment rule.
        return two("=");
      }
      case BinOp::Ne: return "(not " + two("=") + ")";
      case BinOp::Lt: return two("<");
      case BinOp::Gt: return two(">");
      case BinOp::Le: return two("<=");
      case BinOp::Ge: return two(">=");
      case BinOp::And:
        return "(and " + bool_term(e->args[0]) + " " + bool_term(e->args[1]) + ")";
      case BinOp::Or:
        return "(or " + bool_term(e->args[0]) + " " + bool_term(e->args[1]) + ")";
      default:
        break;
    }
  }
  if (e->kind == ExprKind::Const) return e->value != 0 ? "true" : "false";
  return "(not (= " + int_term(e) + " 0))";
}

void formula_text(std::ostringstream& os, const FormulaPtr& f) {
  switch (f->kind) {
    case FormulaKind::True: os << "true"; return;
    case FormulaKind::False: os << "false"; return;
    case FormulaKind::Atom: os << bool_term(f->atom); return;
    case FormulaKind::Not: os << "(not"; break;
    case FormulaKind::And: os << "(and"; break;
    case FormulaKind::Or: os << "(or"; break;
    case FormulaKind::Implies: os << "(=>"; break;
    case FormulaKind::Exists:
    case FormulaKind::Forall:
      os << (f->kind == FormulaKind::Exists ? "(exists (" : "(forall (");
      for (std::size_t i = 0; i < f->vars.size(); ++i) {
        if (i) os << ' ';
        os << '(' << smt_symbol(f->vars[i].name) << ' ' << smt_sort(f->vars[i].sort) << ')';
      }
      os << ')';
      break;
  }
  for (const auto& k : f->kids) {
    os << ' ';
    formula_text(os, k);
  }
  os << ')';
}

void collect_arities(const ExprPtr& e, std::map<std::string, int>& out) {
  if (e->kind == ExprKind::Apply) {
    auto [it, fresh] = out.emplace(e->name, static_cast<int>(e->args.size()));
    if (!fresh && it->second != static_cast<int>(e->args.size()))
      throw SmtError("procedure symbol " + e->name + " used with different arities");
  }
  for (const auto& a : e->args) collect_arities(a, out);
}

void collect_arities(const FormulaPtr& f, std::map<std::string, int>& out) {
  if (f->kind == FormulaKind::Atom) {
    collect_arities(f->atom, out);
    return;
  }
  for (const auto& k : f->kids) collect_arities(k, out);
}

}  // namespace

std::string smt_int_term(const ExprPtr& e) { return int_term(e); }

std::string smt_formula(const FormulaPtr& f) {
  std::ostringstream os;
  formula_text(os, f);
  return os.str();
}

SmtQuery make_query(const std::string& label, const std::vector<FormulaPtr>& asserted,
                    const SymbolTable& table) {
  SmtQuery q;
  q.label = label;
  std::map<std::string, int> used;
  for (const auto& f : asserted) {
    for (const auto& v : free_vars(f)) q.constants[v] = table.sort(v);
    collect_arities(f, used);
    q.assertions.push_back(smt_formula(f));
  }
  for (const auto& [name, arity] : used) {
    auto it = table.arities.find(name);
    if (it == table.arities.end()) {
      if (table.strict) throw SmtError("undeclared procedure symbol " + name);
      q.functions[name] = arity;
    } else {
      if (it->second != arity)
        throw SmtError("procedure symbol " + name + " applied to " + std::to_string(arity) +
                       " argument(s), declared with " + std::to_string(it->second));
      q.functions[name] = arity;
    }
  }
  for (const auto& [name, arity] : q.functions) {
    (void)arity;
    if (q.constants.count(name))
      throw SmtError("name " + name + " used both as a variable and a procedure symbol");
  }
  return q;
}

std::string SmtQuery::text() const {
  std::ostringstream os;
  os << "; " << label << '\n';
  os << "(set-option :produce-models true)\n";
  os << "(set-logic " << logic << ")\n";
  for (const auto& [name, arity] : functions) {
    os << "(declare-fun " << smt_symbol(name) << " (";
    for (int i = 0; i < arity; ++i) os << (i ? " Int" : "Int");
    os << ") Int)\n";
  }
  for (const auto& [name, sort] : constants)
    os << "(declare-fun " << smt_symbol(name) << " () " << smt_sort(sort) << ")\n";
  for (const auto& a : assertions) os << "(assert " << a << ")\n";
  os << "(check-sat)\n(get-model)\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Models
// ---------------------------------------------------------------------------

std::optional<Int> ModelValue::at(const std::vector<Int>& key) const {
  switch (kind) {
    case Kind::Int:
      if (key.empty()) return value;
      return std::nullopt;
    case Kind::Array: {
      if (key.empty()) return std::nullopt;
      std::vector<Int> rest(key.begin() + 1, key.end());
      for (auto it = entries.rbegin(); it != entries.rend(); ++it)
        if (it->first.size() == 1 && it->first[0] == key[0]) return it->second->at(rest);
      return fallback ? fallback->at(rest) : std::nullopt;
    }
    case Kind::Function:
      for (const auto& [args, v] : entries)
        if (args == key) return v->at({});
      return fallback ? fallback->at({}) : std::nullopt;
    case Kind::Opaque:
      return std::nullopt;
  }
  return std::nullopt;
}

namespace {

ModelValuePtr opaque(const SExpr& e) {
  auto v = std::make_shared<ModelValue>();
  v->kind = ModelValue::Kind::Opaque;
  v->text = e.str();
  return v;
}

ModelValuePtr int_value(const SExpr& e) {
  std::string digits;
  bool negative = false;
  if (e.is_atom) {
    digits = e.atom;
  } else if (e.list.size() == 2 && e.list[0].is("-") && e.list[1].is_atom) {
    negative = true;
    digits = e.list[1].atom;
  } else {
    return nullptr;
  }
  if (digits.empty()) return nullptr;
  for (char c : digits)
    if (c < '0' || c > '9') return nullptr;
  auto v = std::make_shared<ModelValue>();
  v->kind = ModelValue::Kind::Int;
  v->text = (negative ? "-" : "") + digits;
  errno = 0;
  char* end = nullptr;
  long long parsed = std::strtoll(v->text.c_str(), &end, 10);
  if (errno == 0 && end && *end == '\0') v->value = parsed;
  return v;
}

using Defs = std::map<std::string, const SExpr*>;

ModelValuePtr value_of(const SExpr& e, const Defs& defs, int depth);

// Reads `(ite (= x!0 c) v rest)` chains, including conjunctions of
// equalities for several parameters.
ModelValuePtr function_value(const std::vector<std::string>& params, const SExpr& body,
                             const Defs& defs, int depth) {
  auto fn = std::make_shared<ModelValue>();
  fn->kind = ModelValue::Kind::Function;
  const SExpr* cur = &body;
  while (!cur->is_atom && cur->list.size() == 4 && cur->list[0].is("ite")) {
    const SExpr& cond = cur->list[1];
    std::vector<const SExpr*> eqs;
    if (!cond.is_atom && !cond.list.empty() && cond.list[0].is("and")) {
      for (std::size_t i = 1; i < cond.list.size(); ++i) eqs.push_back(&cond.list[i]);
    } else {
      eqs.push_back(&cond);
    }
    std::map<std::string, Int> binding;
    for (const SExpr* eq : eqs) {
      if (eq->is_atom || eq->list.size() != 3 || !eq->list[0].is("=")) return opaque(body);
      const SExpr* var = &eq->list[1];
      const SExpr* val = &eq->list[2];
      if (!var->is_atom || int_value(*var)) std::swap(var, val);
      auto iv = int_value(*val);
      if (!var->is_atom || !iv || !iv->value) return opaque(body);
      binding[var->atom] = *iv->value;
    }
    std::vector<Int> key;
    for (const auto& p : params) {
      auto it = binding.find(p);
      if (it == binding.end()) return opaque(body);
      key.push_back(it->second);
    }
    auto v = value_of(cur->list[2], defs, depth + 1);
    if (!v || v->kind != ModelValue::Kind::Int) return opaque(body);
    fn->entries.push_back({key, v});
    cur = &cur->list[3];
  }
  auto fallback = value_of(*cur, defs, depth + 1);
  if (!fallback || fallback->kind != ModelValue::Kind::Int) return opaque(body);
  fn->fallback = fallback;
  return fn;
}

ModelValuePtr value_of(const SExpr& e, const Defs& defs, int depth) {
  if (depth > 64) return opaque(e);
  if (auto v = int_value(e)) return v;
  if (e.is_atom) return opaque(e);
  const auto& l = e.list;
  // ((as const (Array ...)) v)
  if (l.size() == 2 && !l[0].is_atom && l[0].list.size() == 3 && l[0].list[0].is("as") &&
      l[0].list[1].is("const")) {
    auto arr = std::make_shared<ModelValue>();
    arr->kind = ModelValue::Kind::Array;
    arr->fallback = value_of(l[1], defs, depth + 1);
    if (arr->fallback->kind == ModelValue::Kind::Opaque) return opaque(e);
    return arr;
  }
  // (store a i v)
  if (l.size() == 4 && l[0].is("store")) {
    auto base = value_of(l[1], defs, depth + 1);
    auto idx = int_value(l[2]);
    auto val = value_of(l[3], defs, depth + 1);
    if (base->kind != ModelValue::Kind::Array || !idx || !idx->value ||
        val->kind == ModelValue::Kind::Opaque)
      return opaque(e);
    auto arr = std::make_shared<ModelValue>(*base);
    arr->entries.push_back({{*idx->value}, val});
    return arr;
  }
  // (_ as-array f)
  if (l.size() == 3 && l[0].is("_") && l[1].is("as-array") && l[2].is_atom) {
    auto it = defs.find(l[2].atom);
    if (it == defs.end()) return opaque(e);
    const SExpr& def = *it->second;
    if (def.list[2].is_atom || def.list[2].list.size() != 1) return opaque(e);
    std::string param = def.list[2].list[0].list[0].atom;
    auto fn = function_value({param}, def.list[4], defs, depth + 1);
    if (fn->kind != ModelValue::Kind::Function) return opaque(e);
    auto arr = std::make_shared<ModelValue>();
    arr->kind = ModelValue::Kind::Array;
    arr->fallback = fn->fallback;
    arr->entries = fn->entries;
    return arr;
  }
  return opaque(e);
}

}  // namespace

Model parse_model(const SExpr& e) {
  Model out;
  if (e.is_atom) return out;
  Defs defs;
  std::vector<const SExpr*> forms;
  for (const auto& item : e.list) {
    if (item.is_atom) continue;  // the leading `model` keyword
    if (item.list.size() == 5 && item.list[0].is("define-fun") && item.list[1].is_atom) {
      defs[item.list[1].atom] = &item;
      forms.push_back(&item);
    }
  }
  for (const SExpr* f : forms) {
    const std::string& name = f->list[1].atom;
    const SExpr& params = f->list[2];
    const SExpr& body = f->list[4];
    if (params.is_atom || params.list.empty()) {
      out[name] = value_of(body, defs, 0);
      continue;
    }
    std::vector<std::string> names;
    bool ok = true;
    for (const auto& p : params.list) {
      if (p.is_atom || p.list.empty() || !p.list[0].is_atom) {
        ok = false;
        break;
      }
      names.push_back(p.list[0].atom);
    }
    out[name] = ok ? function_value(names, body, defs, 0) : opaque(body);
  }
  for (auto& [name, v] : out) {
    if (!v->text.empty()) continue;
    auto copy = std::make_shared<ModelValue>(*v);
    copy->text = defs.at(name)->list[4].str();
    v = copy;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Process
// ---------------------------------------------------------------------------

const char* to_string(Answer a) {
  switch (a) {
    case Answer::Sat: return "sat";
    case Answer::Unsat: return "unsat";
    case Answer::Unknown: return "unknown";
    case Answer::Timeout: return "timeout";
  }
  return "unknown";
}

SolverConfig SolverConfig::for_command(const std::string& path, std::vector<std::string> args) {
  SolverConfig cfg;
  cfg.command = path;
  cfg.args = std::move(args);
  std::string base = path.substr(path.find_last_of('/') == std::string::npos
                                     ? 0
                                     : path.find_last_of('/') + 1);
  if (cfg.args.empty() && base.find("z3") != std::string::npos) cfg.args = {"-in"};
  return cfg;
}

SolverConfig SolverConfig::from_environment() {
  const char* env = std::getenv("OPCHECK_SOLVER");
  if (!env || !*env) return SolverConfig{};
  std::istringstream in(env);
  std::vector<std::string> words;
  for (std::string w; in >> w;) words.push_back(w);
  if (words.empty()) return SolverConfig{};
  std::string cmd = words.front();
  words.erase(words.begin());
  return for_command(cmd, std::move(words));
}

namespace {

void close_fd(int& fd) {
  if (fd >= 0) ::close(fd);
  fd = -1;
}

}  // namespace

std::string run_process(const std::string& command, const std::vector<std::string>& args,
                        const std::string& input, double timeout_s, bool& timed_out) {
  timed_out = false;
  int in_pipe[2], out_pipe[2], err_pipe[2];
  if (::pipe(in_pipe) != 0) throw SolverError(SolverError::Kind::Spawn, "pipe failed");
  if (::pipe(out_pipe) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw SolverError(SolverError::Kind::Spawn, "pipe failed");
  }
  if (::pipe2(err_pipe, O_CLOEXEC) != 0) {
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) ::close(fd);
    throw SolverError(SolverError::Kind::Spawn, "pipe failed");
  }

  std::vector<std::string> argv_store{command};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  argv.push_back(nullptr);

  pid_t pid = ::fork();
  if (pid < 0) {
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1], err_pipe[0], err_pipe[1]})
      ::close(fd);
    throw SolverError(SolverError::Kind::Spawn, "fork failed");
  }
  if (pid == 0) {
    ::setpgid(0, 0);
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    int devnull = ::open("/dev/null", O_WRONLY);
    if (devnull >= 0) ::dup2(devnull, STDERR_FILENO);
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1], err_pipe[0]}) ::close(fd);
    ::execvp(argv[0], argv.data());
    int err = errno;
    ssize_t ignored = ::write(err_pipe[1], &err, sizeof err);
    (void)ignored;
    ::_exit(127);
  }

  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  ::close(err_pipe[1]);
  int child_err = 0;
  ssize_t n = ::read(err_pipe[0], &child_err, sizeof child_err);
  ::close(err_pipe[0]);
  if (n == static_cast<ssize_t>(sizeof child_err)) {
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    ::waitpid(pid, nullptr, 0);
    throw SolverError(SolverError::Kind::Spawn,
                      "cannot run solver '" + command + "': " + std::strerror(child_err));
  }

  int to_child = in_pipe[1];
  int from_child = out_pipe[0];
  ::fcntl(to_child, F_SETFL, O_NONBLOCK);
  struct sigaction ignore_pipe {}, old_pipe {};
  ignore_pipe.sa_handler = SIG_IGN;
  ::sigaction(SIGPIPE, &ignore_pipe, &old_pipe);

  std::string output;
  std::size_t written = 0;
  if (input.empty()) close_fd(to_child);
  const auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::milliseconds(static_cast<long long>(timeout_s * 1000));
  char buf[65536];
  while (from_child >= 0) {
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                    deadline - std::chrono::steady_clock::now())
                    .count();
    if (left <= 0) {
      timed_out = true;
      break;
    }
    pollfd fds[2];
    int nfds = 0;
    fds[nfds++] = {from_child, POLLIN, 0};
    if (to_child >= 0) fds[nfds++] = {to_child, POLLOUT, 0};
    int rc = ::poll(fds, static_cast<nfds_t>(nfds), static_cast<int>(std::min<long long>(left, 1000)));
    if (rc < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (nfds == 2 && (fds[1].revents & (POLLOUT | POLLERR | POLLHUP))) {
      ssize_t w = ::write(to_child, input.data() + written, input.size() - written);
      if (w > 0) written += static_cast<std::size_t>(w);
      if (w < 0 && errno != EAGAIN) written = input.size();
      if (written >= input.size()) close_fd(to_child);
    }
    if (fds[0].revents & (POLLIN | POLLHUP | POLLERR)) {
      ssize_t r = ::read(from_child, buf, sizeof buf);
      if (r > 0) {
        output.append(buf, static_cast<std::size_t>(r));
      } else if (r == 0 || errno != EAGAIN) {
        close_fd(from_child);
      }
    }
  }
  close_fd(to_child);
  close_fd(from_child);
  if (timed_out) {
    ::kill(-pid, SIGKILL);
    ::kill(pid, SIGKILL);
  }
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  ::sigaction(SIGPIPE, &old_pipe, nullptr);
  return output;
}

SolverResult run_solver(const SolverConfig& cfg, const std::string& script) {
  SolverResult r;
  auto start = std::chrono::steady_clock::now();
  bool timed_out = false;
  r.output = run_process(cfg.command, cfg.args, script, cfg.timeout_s, timed_out);
  r.time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                  .count();
  if (timed_out) {
    r.answer = Answer::Timeout;
    r.reason = "timeout";
    return r;
  }
  std::vector<SExpr> items;
  try {
    items = parse_sexprs(r.output);
  } catch (const SExprError& e) {
    throw SolverError(SolverError::Kind::Protocol,
                      std::string("unreadable solver output: ") + e.what());
  }
  std::size_t i = 0;
  while (i < items.size() && !items[i].is_atom) {
    // Errors before the verdict (e.g. unsupported options) are tolerated
    // only if a verdict follows.
    ++i;
  }
  if (i >= items.size())
    throw SolverError(SolverError::Kind::Protocol,
                      "solver gave no verdict; output: " + r.output.substr(0, 400));
  const std::string& verdict = items[i].atom;
  if (verdict == "sat") {
    r.answer = Answer::Sat;
    for (std::size_t k = i + 1; k < items.size(); ++k) {
      const auto& item = items[k];
      if (item.is_atom || item.list.empty()) continue;
      if (item.list[0].is("error")) continue;
      r.model = parse_model(item);
      break;
    }
  } else if (verdict == "unsat") {
    r.answer = Answer::Unsat;
  } else if (verdict == "unknown") {
    r.answer = Answer::Unknown;
    r.reason = "solver-unknown";
  } else if (verdict == "timeout") {
    r.answer = Answer::Timeout;
    r.reason = "timeout";
  } else {
    throw SolverError(SolverError::Kind::Protocol, "unexpected solver verdict '" + verdict + "'");
  }
  return r;
}

std::string solver_identity(const SolverConfig& cfg) {
  bool timed_out = false;
  std::string out = run_process(cfg.command, cfg.args, "(get-info :name)\n(get-info :version)\n",
                                cfg.timeout_s, timed_out);
  std::string name, version;
  try {
    for (const auto& e : parse_sexprs(out)) {
      if (e.is_atom || e.list.size() != 2) continue;
      std::string v = e.list[1].atom;
      if (v.size() >= 2 && v.front() == '"') v = v.substr(1, v.size() - 2);
      if (e.list[0].is(":name")) name = v;
      if (e.list[0].is(":version")) version = v;
    }
  } catch (const SExprError&) {
  }
  if (name.empty()) return cfg.command;
  return version.empty() ? name : name + " " + version;
}

}  // namespace opcheck
