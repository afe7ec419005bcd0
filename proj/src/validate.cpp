#include <map>
#include <set>

#include "opcheck/frontend.hpp"

namespace opcheck {

std::string to_string(const Diagnostic& d) {
  return std::to_string(d.pos.line) + ":" + std::to_string(d.pos.column) + ": " + d.code +
         ": " + d.message;
}

namespace {

class Validator {
 public:
  explicit Validator(const Library& lib) : lib_(lib) {}

  std::vector<Diagnostic> run() {
    if (lib_.procedures.empty())
      report("empty-library", "a library needs at least one procedure", {1, 1});
    for (const auto& g : lib_.globals) check_name(g.name, g.pos);
    for (const auto& p : lib_.procedures) procedure(p);
    return std::move(out_);
  }

  std::vector<Diagnostic> invariant(const FormulaPtr& inv, SourcePos pos) {
    formula(inv, {}, pos);
    return std::move(out_);
  }

 private:
  void report(std::string code, std::string message, SourcePos pos) {
    out_.push_back({std::move(code), std::move(message), pos});
  }

  void check_name(const std::string& name, SourcePos pos) {
    if (name.find('$') != std::string::npos)
      report("reserved-name", "'$' is reserved for generated names: " + name, pos);
  }

  void procedure(const Procedure& p) {
    proc_ = &p;
    check_name(p.name, p.pos);
    std::set<std::string> seen;
    for (const auto& n : p.params) {
      check_name(n, p.pos);
      if (!seen.insert(n).second)
        report("duplicate-declaration", "parameter '" + n + "' declared twice", p.pos);
      if (lib_.is_global(n))
        report("shadowed-global", "parameter '" + n + "' has the name of a global", p.pos);
      if (lib_.find_procedure(n))
        report("kind-mismatch", "parameter '" + n + "' has the name of a procedure", p.pos);
    }
    if (!p.body || p.body->kind != StmtKind::Block || p.body->body.empty() ||
        p.body->body.back()->kind != StmtKind::Return) {
      report("missing-return", "procedure '" + p.name + "' must end with a return statement",
             p.pos);
    }
    if (p.body) statement(p.body, true);
    if (p.invariant) formula(p.invariant, {}, p.pos);
    proc_ = nullptr;
  }

  bool is_formal(const std::string& n) const {
    for (const auto& f : proc_->params)
      if (f == n) return true;
    return false;
  }

  void scalar_target(const std::string& n, SourcePos pos) {
    check_name(n, pos);
    if (is_formal(n))
      report("assignment-to-formal", "formal parameter '" + n + "' is read-only", pos);
    if (lib_.find_procedure(n))
      report("kind-mismatch", "cannot assign to procedure name '" + n + "'", pos);
    if (auto g = lib_.find_global(n); g && g->kind != VarKind::Scalar)
      report("kind-mismatch", "array '" + n + "' assigned as a scalar", pos);
  }

  void statement(const StmtPtr& s, bool top) {
    switch (s->kind) {
      case StmtKind::Assign:
        scalar_target(s->target, s->pos);
        expr(s->value);
        break;
      case StmtKind::ArrayAssign: {
        check_name(s->target, s->pos);
        auto g = lib_.find_global(s->target);
        if (!g || g->kind == VarKind::Scalar)
          report("kind-mismatch", "'" + s->target + "' is not a global array", s->pos);
        else if (static_cast<std::size_t>(array_rank(g->kind)) != s->indices.size())
          report("kind-mismatch", "wrong number of indices for '" + s->target + "'", s->pos);
        for (const auto& i : s->indices) expr(i);
        expr(s->value);
        break;
      }
      case StmtKind::Call: {
        scalar_target(s->target, s->pos);
        auto q = lib_.find_procedure(s->callee);
        if (!q)
          report("undeclared-procedure", "call to undeclared procedure '" + s->callee + "'",
                 s->pos);
        else if (q->params.size() != s->args.size())
          report("arity-mismatch",
                 "'" + s->callee + "' expects " + std::to_string(q->params.size()) +
                     " argument(s), got " + std::to_string(s->args.size()),
                 s->pos);
        for (const auto& a : s->args) expr(a);
        break;
      }
      case StmtKind::Block:
        for (std::size_t i = 0; i < s->body.size(); ++i) {
          const auto& c = s->body[i];
          if (c->kind == StmtKind::Return && !(top && i + 1 == s->body.size()))
            report("return-not-last", "return must be the last statement of the procedure",
                   c->pos);
          statement(c, false);
        }
        break;
      case StmtKind::If:
        expr(s->value);
        statement(s->body[0], false);
        statement(s->body[1], false);
        break;
      case StmtKind::Return:
        check_name(s->target, s->pos);
        if (lib_.find_procedure(s->target))
          report("kind-mismatch", "cannot return procedure name '" + s->target + "'", s->pos);
        if (auto g = lib_.find_global(s->target); g && g->kind != VarKind::Scalar)
          report("kind-mismatch", "cannot return array '" + s->target + "'", s->pos);
        break;
      case StmtKind::Skip:
        break;
      case StmtKind::Havoc:
      case StmtKind::Assume:
      case StmtKind::Assert:
        report("transform-only-statement",
               "havoc/assume/assert may not appear in source programs", s->pos);
        break;
    }
  }

  void expr(const ExprPtr& e) {
    switch (e->kind) {
      case ExprKind::Var:
        check_name(e->name, e->pos);
        if (lib_.find_procedure(e->name))
          report("kind-mismatch", "procedure '" + e->name + "' used as a variable", e->pos);
        if (auto g = lib_.find_global(e->name); g && g->kind != VarKind::Scalar)
          report("kind-mismatch", "array '" + e->name + "' used as a scalar", e->pos);
        break;
      case ExprKind::Select: {
        auto g = lib_.find_global(e->name);
        if (!g || g->kind == VarKind::Scalar)
          report("kind-mismatch", "'" + e->name + "' is not a global array", e->pos);
        else if (static_cast<std::size_t>(array_rank(g->kind)) != e->args.size())
          report("kind-mismatch", "wrong number of indices for '" + e->name + "'", e->pos);
        break;
      }
      case ExprKind::Apply:
      case ExprKind::Store:
        report("kind-mismatch", "only allowed in formulas", e->pos);
        break;
      default:
        break;
    }
    for (const auto& a : e->args) expr(a);
  }

  // Formula checks: free names must be globals, symbols must be procedures.
  void formula(const FormulaPtr& f, std::map<std::string, Sort> bound, SourcePos pos) {
    switch (f->kind) {
      case FormulaKind::Atom:
        term(f->atom, bound, pos);
        return;
      case FormulaKind::Exists:
      case FormulaKind::Forall:
        for (const auto& v : f->vars) {
          check_name(v.name, pos);
          bound[v.name] = v.sort;
        }
        formula(f->kids[0], bound, pos);
        return;
      default:
        for (const auto& k : f->kids) formula(k, bound, pos);
    }
  }

  int rank_of(const std::string& n, const std::map<std::string, Sort>& bound,
              SourcePos pos) {
    if (auto it = bound.find(n); it != bound.end()) return sort_rank(it->second);
    if (auto g = lib_.find_global(n)) return array_rank(g->kind);
    report("invariant-scope",
           "invariant mentions '" + n + "', which is neither a global nor bound", pos);
    return -1;
  }

  void term(const ExprPtr& e, const std::map<std::string, Sort>& bound, SourcePos fpos) {
    SourcePos pos = e->pos.line ? e->pos : fpos;
    switch (e->kind) {
      case ExprKind::Var: {
        check_name(e->name, pos);
        int r = rank_of(e->name, bound, pos);
        if (r > 0) report("kind-mismatch", "array '" + e->name + "' used as a scalar", pos);
        break;
      }
      case ExprKind::Select:
      case ExprKind::Store: {
        int r = rank_of(e->name, bound, pos);
        std::size_t idx = e->args.size() - (e->kind == ExprKind::Store ? 1 : 0);
        if (r == 0) report("kind-mismatch", "'" + e->name + "' is not an array", pos);
        if (r > 0 && static_cast<std::size_t>(r) != idx)
          report("kind-mismatch", "wrong number of indices for '" + e->name + "'", pos);
        break;
      }
      case ExprKind::Apply: {
        auto q = lib_.find_procedure(e->name);
        if (!q)
          report("undeclared-procedure", "unknown procedure symbol '" + e->name + "'", pos);
        else if (q->params.size() != e->args.size())
          report("arity-mismatch", "'" + e->name + "' expects " +
                                       std::to_string(q->params.size()) + " argument(s)",
                 pos);
        break;
      }
      default:
        break;
    }
    for (const auto& a : e->args) term(a, bound, fpos);
  }

  const Library& lib_;
  const Procedure* proc_ = nullptr;
  std::vector<Diagnostic> out_;
};

}  // namespace

std::vector<Diagnostic> validate(const Library& lib) { return Validator(lib).run(); }

std::vector<Diagnostic> check_invariant_scope(const Library& lib, const FormulaPtr& inv,
                                              SourcePos pos) {
  return Validator(lib).invariant(inv, pos);
}

}  // namespace opcheck
