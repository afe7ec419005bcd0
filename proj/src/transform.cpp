#include "opcheck/transform.hpp"

#include <stdexcept>

namespace opcheck {

FormulaPtr effective_invariant(const Procedure& p) {
  return p.invariant ? p.invariant : Formula::top();
}

Sort sort_of_name(const Library& lib, const std::string& name) {
  if (auto g = lib.find_global(base_name(name))) return sort_of(g->kind);
  return Sort::Int;
}

std::set<std::string> reserved_names(const Library& lib, const Procedure& p,
                                     const FormulaPtr& inv) {
  std::set<std::string> out;
  for (const auto& g : lib.globals) out.insert(g.name);
  for (const auto& q : lib.procedures) {
    out.insert(q.name);
    if (q.invariant) {
      auto n = all_names(q.invariant);
      out.insert(n.begin(), n.end());
    }
  }
  auto body = names_in(p.body);
  out.insert(body.begin(), body.end());
  out.insert(p.params.begin(), p.params.end());
  if (inv) {
    auto n = all_names(inv);
    out.insert(n.begin(), n.end());
  }
  return out;
}

namespace {

bool mentions(const ExprPtr& e, const std::string& name) { return vars_of(e).count(name) != 0; }

void count_assignments(const StmtPtr& s, std::map<std::string, int>& counts) {
  switch (s->kind) {
    case StmtKind::Assign:
    case StmtKind::ArrayAssign:
    case StmtKind::Call:
      ++counts[s->target];
      break;
    default:
      break;
  }
  for (const auto& c : s->body) count_assignments(c, counts);
}

StmtPtr with_body(const StmtPtr& s, std::vector<StmtPtr> body) {
  auto copy = std::make_shared<Stmt>(*s);
  copy->body = std::move(body);
  return copy;
}

void normalize_into(const StmtPtr& s, NameSupply& names, std::vector<StmtPtr>& out) {
  switch (s->kind) {
    case StmtKind::Assign:
      if (mentions(s->value, s->target)) {
        std::string t = names.fresh_plain("t");
        out.push_back(Stmt::assign(t, s->value, s->pos));
        out.push_back(Stmt::assign(s->target, Expr::var(t), s->pos));
      } else {
        out.push_back(s);
      }
      return;
    case StmtKind::ArrayAssign: {
      std::vector<ExprPtr> idx;
      bool changed = false;
      for (const auto& i : s->indices) {
        if (mentions(i, s->target)) {
          std::string t = names.fresh_plain("t");
          out.push_back(Stmt::assign(t, i, s->pos));
          idx.push_back(Expr::var(t));
          changed = true;
        } else {
          idx.push_back(i);
        }
      }
      ExprPtr value = s->value;
      if (mentions(value, s->target)) {
        std::string t = names.fresh_plain("t");
        out.push_back(Stmt::assign(t, value, s->pos));
        value = Expr::var(t);
        changed = true;
      }
      out.push_back(changed ? Stmt::array_assign(s->target, idx, value, s->pos) : s);
      return;
    }
    case StmtKind::Block: {
      std::vector<StmtPtr> flat;
      for (const auto& c : s->body) normalize_into(c, names, flat);
      bool changed = flat.size() != s->body.size();
      for (std::size_t i = 0; !changed && i < flat.size(); ++i) changed = flat[i] != s->body[i];
      out.push_back(changed ? with_body(s, std::move(flat)) : s);
      return;
    }
    case StmtKind::If: {
      auto then_branch = normalize_self_assign(s->body[0], names);
      auto else_branch = normalize_self_assign(s->body[1], names);
      bool changed = then_branch != s->body[0] || else_branch != s->body[1];
      out.push_back(changed ? with_body(s, {then_branch, else_branch}) : s);
      return;
    }
    default:
      out.push_back(s);
  }
}

class Transformer {
 public:
  Transformer(const Library& lib, const Procedure& p, const FormulaPtr& inv)
      : lib_(lib), proc_(p), inv_(inv), names_(reserved_names(lib, p, inv)) {
    count_assignments(p.body, assigned_);
    for (const auto& g : lib.globals)
      if (mutable_.count(g.name)) havoc_order_.push_back(g.name);
  }

  TransformedBody run() {
    TransformedBody tb;
    tb.result_var = proc_.return_var();
    StmtPtr normalized = normalize_self_assign(proc_.body, names_);
    std::vector<StmtPtr> out;
    for (const auto& s : normalized->body) rewrite(s, out);
    tb.body = Stmt::block(std::move(out), proc_.body->pos);
    tb.call_sites = call_sites_;
    tb.assert_sites = next_site_;
    tb.temporaries = temps_;
    tb.havocked = havoc_order_;
    return tb;
  }

 private:
  std::string temp() {
    std::string t = names_.fresh_plain("t");
    temps_.insert(t);
    return t;
  }

  StmtPtr rewrite_block(const StmtPtr& s) {
    std::vector<StmtPtr> out;
    if (s->kind == StmtKind::Block) {
      for (const auto& c : s->body) rewrite(c, out);
    } else {
      rewrite(s, out);
    }
    return Stmt::block(std::move(out), s->pos);
  }

  void rewrite(const StmtPtr& s, std::vector<StmtPtr>& out) {
    switch (s->kind) {
      case StmtKind::Call:
        call(s, out);
        return;
      case StmtKind::Return:
        out.push_back(Stmt::assert_(inv_, next_site_++));
        return;
      case StmtKind::If:
        out.push_back(
            Stmt::if_(s->value, rewrite_block(s->body[0]), rewrite_block(s->body[1]), s->pos));
        return;
      case StmtKind::Block:
        out.push_back(rewrite_block(s));
        return;
      default:
        out.push_back(s);
    }
  }

  void call(const StmtPtr& s, std::vector<StmtPtr>& out) {
    const Procedure* callee = lib_.find_procedure(s->callee);
    if (!callee) throw std::logic_error("call to undeclared procedure " + s->callee);
    ++call_sites_;

    std::vector<std::string> arg_names;
    std::vector<ExprPtr> arg_exprs;
    for (const auto& a : s->args) {
      if (a->kind == ExprKind::Var && !lib_.is_global(a->name)) {
        arg_names.push_back(a->name);
        arg_exprs.push_back(a);
        continue;
      }
      std::string t = temp();
      out.push_back(Stmt::assign(t, a, s->pos));
      arg_names.push_back(t);
      arg_exprs.push_back(Expr::var(t));
    }

    // The equation variable must be unconstrained before the assumption:
    // a global keeps its pre-call meaning in the invariant, and a local
    // that was assigned elsewhere or passed as an argument may already
    // carry a value.
    std::string lhs = s->target;
    bool in_args = false;
    for (const auto& a : arg_names) in_args = in_args || a == lhs;
    bool needs_temp = lib_.is_global(lhs) || in_args || assigned_[lhs] > 1;
    std::string eq_var = needs_temp ? temp() : lhs;

    out.push_back(Stmt::assert_(inv_, next_site_++));
    for (const auto& g : havoc_order_) out.push_back(Stmt::havoc(g));

    std::vector<FormulaPtr> assumed{inv_};
    if (callee->name != proc_.name && callee->invariant) assumed.push_back(callee->invariant);
    assumed.push_back(Formula::eq(Expr::var(eq_var), Expr::apply(s->callee, arg_exprs)));
    FormulaPtr fact = simplify_light(Formula::conj(std::move(assumed)));
    out.push_back(Stmt::assume(fact, CallOrigin{eq_var, s->callee, arg_names}));
    if (needs_temp) out.push_back(Stmt::assign(lhs, Expr::var(eq_var), s->pos));
  }

  const Library& lib_;
  const Procedure& proc_;
  FormulaPtr inv_;
  NameSupply names_;
  std::set<std::string> mutable_ = lib_.mutable_globals();
  std::vector<std::string> havoc_order_;
  std::map<std::string, int> assigned_;
  std::set<std::string> temps_;
  int call_sites_ = 0;
  int next_site_ = 0;
};

}  // namespace

StmtPtr normalize_self_assign(const StmtPtr& s, NameSupply& names) {
  std::vector<StmtPtr> out;
  normalize_into(s, names, out);
  if (out.size() == 1) return out.front();
  return Stmt::block(std::move(out), s->pos);
}

TransformedBody transform_body(const Library& lib, const Procedure& p, const FormulaPtr& inv) {
  return Transformer(lib, p, inv ? inv : Formula::top()).run();
}

FormulaPtr init_formula(const Library& lib) {
  std::set<std::string> taken;
  for (const auto& g : lib.globals) taken.insert(g.name);
  NameSupply names(taken);
  auto binder = [&](const std::string& n) { return names.taken(n) ? names.fresh(n) : n; };
  const std::string k = binder("k"), k1 = binder("k1"), k2 = binder("k2");
  std::vector<FormulaPtr> parts;
  for (const auto& g : lib.globals) {
    ExprPtr c = Expr::constant(g.init);
    switch (g.kind) {
      case VarKind::Scalar:
        parts.push_back(Formula::eq(Expr::var(g.name), c));
        break;
      case VarKind::Array1:
        parts.push_back(Formula::forall(
            {{k, Sort::Int}}, Formula::eq(Expr::select(g.name, {Expr::var(k)}), c)));
        break;
      case VarKind::Array2:
        parts.push_back(Formula::forall(
            {{k1, Sort::Int}, {k2, Sort::Int}},
            Formula::eq(Expr::select(g.name, {Expr::var(k1), Expr::var(k2)}), c)));
        break;
    }
  }
  return Formula::conj(std::move(parts));
}

}  // namespace opcheck
