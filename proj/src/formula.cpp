#include "opcheck/formula.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "opcheck/arith.hpp"

namespace opcheck {

Sort sort_of(VarKind k) {
  switch (k) {
    case VarKind::Scalar: return Sort::Int;
    case VarKind::Array1: return Sort::Array1;
    case VarKind::Array2: return Sort::Array2;
  }
  return Sort::Int;
}

int sort_rank(Sort s) {
  switch (s) {
    case Sort::Int: return 0;
    case Sort::Array1: return 1;
    case Sort::Array2: return 2;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Construction
// ---------------------------------------------------------------------------

namespace {

FormulaPtr make(FormulaKind kind) {
  auto f = std::make_shared<Formula>();
  f->kind = kind;
  return f;
}

}  // namespace

FormulaPtr Formula::top() {
  static const FormulaPtr t = make(FormulaKind::True);
  return t;
}

FormulaPtr Formula::bottom() {
  static const FormulaPtr f = make(FormulaKind::False);
  return f;
}

FormulaPtr Formula::make_atom(ExprPtr e) {
  auto f = std::make_shared<Formula>();
  f->kind = FormulaKind::Atom;
  f->atom = std::move(e);
  return f;
}

FormulaPtr Formula::negate(FormulaPtr k) {
  auto f = std::make_shared<Formula>();
  f->kind = FormulaKind::Not;
  f->kids = {std::move(k)};
  return f;
}

FormulaPtr Formula::conj(std::vector<FormulaPtr> kids) {
  if (kids.empty()) return top();
  if (kids.size() == 1) return kids.front();
  auto f = std::make_shared<Formula>();
  f->kind = FormulaKind::And;
  f->kids = std::move(kids);
  return f;
}

FormulaPtr Formula::disj(std::vector<FormulaPtr> kids) {
  if (kids.empty()) return bottom();
  if (kids.size() == 1) return kids.front();
  auto f = std::make_shared<Formula>();
  f->kind = FormulaKind::Or;
  f->kids = std::move(kids);
  return f;
}

FormulaPtr Formula::implies(FormulaPtr lhs, FormulaPtr rhs) {
  auto f = std::make_shared<Formula>();
  f->kind = FormulaKind::Implies;
  f->kids = {std::move(lhs), std::move(rhs)};
  return f;
}

FormulaPtr Formula::exists(std::vector<BoundVar> vars, FormulaPtr body) {
  if (vars.empty()) return body;
  auto f = std::make_shared<Formula>();
  f->kind = FormulaKind::Exists;
  f->vars = std::move(vars);
  f->kids = {std::move(body)};
  return f;
}

FormulaPtr Formula::forall(std::vector<BoundVar> vars, FormulaPtr body) {
  if (vars.empty()) return body;
  auto f = std::make_shared<Formula>();
  f->kind = FormulaKind::Forall;
  f->vars = std::move(vars);
  f->kids = {std::move(body)};
  return f;
}

FormulaPtr Formula::eq(ExprPtr lhs, ExprPtr rhs) {
  return make_atom(Expr::binary(BinOp::Eq, std::move(lhs), std::move(rhs)));
}

FormulaPtr from_condition(const ExprPtr& cond) {
  if (cond->kind == ExprKind::Binary && cond->binop == BinOp::And)
    return Formula::conj({from_condition(cond->args[0]), from_condition(cond->args[1])});
  if (cond->kind == ExprKind::Binary && cond->binop == BinOp::Or)
    return Formula::disj({from_condition(cond->args[0]), from_condition(cond->args[1])});
  if (cond->kind == ExprKind::Unary && cond->unop == UnOp::Not)
    return Formula::negate(from_condition(cond->args[0]));
  return Formula::make_atom(cond);
}

bool is_quantifier(const Formula& f) {
  return f.kind == FormulaKind::Exists || f.kind == FormulaKind::Forall;
}

bool equal(const FormulaPtr& a, const FormulaPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind || a->kids.size() != b->kids.size() || a->vars != b->vars)
    return false;
  if (a->kind == FormulaKind::Atom) return equal(a->atom, b->atom);
  for (std::size_t i = 0; i < a->kids.size(); ++i)
    if (!equal(a->kids[i], b->kids[i])) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Alpha-equivalence key
// ---------------------------------------------------------------------------

namespace {

struct KeyWriter {
  std::map<std::string, std::vector<int>> bound;
  int next_id = 0;
  std::string out;

  void name(const std::string& n) {
    auto it = bound.find(n);
    if (it != bound.end() && !it->second.empty()) {
      out += "@" + std::to_string(it->second.back());
    } else {
      out += n;
    }
  }

  void expr(const ExprPtr& e) {
    switch (e->kind) {
      case ExprKind::Const:
        out += std::to_string(e->value);
        return;
      case ExprKind::Var:
        name(e->name);
        return;
      case ExprKind::Select:
        out += "(sel ";
        name(e->name);
        break;
      case ExprKind::Store:
        out += "(sto ";
        name(e->name);
        break;
      case ExprKind::Apply:
        out += "(app " + e->name;
        break;
      case ExprKind::Unary:
        out += e->unop == UnOp::Not ? "(! " : "(neg ";
        break;
      case ExprKind::Binary:
        out += std::string("(") + binop_symbol(e->binop);
        break;
    }
    for (const auto& a : e->args) {
      out += ' ';
      expr(a);
    }
    out += ')';
  }

  void formula(const FormulaPtr& f) {
    switch (f->kind) {
      case FormulaKind::True: out += "T"; return;
      case FormulaKind::False: out += "F"; return;
      case FormulaKind::Atom: expr(f->atom); return;
      case FormulaKind::Not: out += "(not "; break;
      case FormulaKind::And: out += "(and"; break;
      case FormulaKind::Or: out += "(or"; break;
      case FormulaKind::Implies: out += "(=>"; break;
      case FormulaKind::Exists:
      case FormulaKind::Forall: {
        out += f->kind == FormulaKind::Exists ? "(E" : "(A";
        for (const auto& v : f->vars) {
          bound[v.name].push_back(next_id);
          out += " @" + std::to_string(next_id) + ":" + std::to_string(sort_rank(v.sort));
          ++next_id;
        }
        out += ' ';
        formula(f->kids[0]);
        for (const auto& v : f->vars) bound[v.name].pop_back();
        out += ')';
        return;
      }
    }
    for (const auto& k : f->kids) {
      out += ' ';
      formula(k);
    }
    out += ')';
  }
};

}  // namespace

std::string alpha_key(const FormulaPtr& f) {
  KeyWriter w;
  w.formula(f);
  return w.out;
}

bool alpha_equal(const FormulaPtr& a, const FormulaPtr& b) {
  return alpha_key(a) == alpha_key(b);
}

// ---------------------------------------------------------------------------
// Variables
// ---------------------------------------------------------------------------

namespace {

void free_vars_rec(const FormulaPtr& f, std::set<std::string>& bound,
                   std::set<std::string>& out) {
  if (f->kind == FormulaKind::Atom) {
    std::set<std::string> vs;
    collect_vars(f->atom, vs);
    for (const auto& v : vs)
      if (!bound.count(v)) out.insert(v);
    return;
  }
  if (is_quantifier(*f)) {
    std::vector<std::string> added;
    for (const auto& v : f->vars)
      if (bound.insert(v.name).second) added.push_back(v.name);
    free_vars_rec(f->kids[0], bound, out);
    for (const auto& v : added) bound.erase(v);
    return;
  }
  for (const auto& k : f->kids) free_vars_rec(k, bound, out);
}

void applied_rec(const FormulaPtr& f, std::set<std::string>& out) {
  if (f->kind == FormulaKind::Atom) {
    collect_applied(f->atom, out);
    return;
  }
  for (const auto& k : f->kids) applied_rec(k, out);
}

void all_names_rec(const FormulaPtr& f, std::set<std::string>& out) {
  if (f->kind == FormulaKind::Atom) {
    collect_vars(f->atom, out);
    collect_applied(f->atom, out);
    return;
  }
  for (const auto& v : f->vars) out.insert(v.name);
  for (const auto& k : f->kids) all_names_rec(k, out);
}

}  // namespace

std::set<std::string> free_vars(const FormulaPtr& f) {
  std::set<std::string> bound, out;
  free_vars_rec(f, bound, out);
  return out;
}

std::set<std::string> applied_symbols(const FormulaPtr& f) {
  std::set<std::string> out;
  applied_rec(f, out);
  return out;
}

std::set<std::string> all_names(const FormulaPtr& f) {
  std::set<std::string> out;
  all_names_rec(f, out);
  return out;
}

// ---------------------------------------------------------------------------
// Renaming and substitution
// ---------------------------------------------------------------------------

ExprPtr rename_vars(const ExprPtr& e,
                    const std::function<std::string(const std::string&)>& rename) {
  auto copy = std::make_shared<Expr>(*e);
  bool changed = false;
  if (e->kind == ExprKind::Var || e->kind == ExprKind::Select ||
      e->kind == ExprKind::Store) {
    copy->name = rename(e->name);
    changed = copy->name != e->name;
  }
  for (auto& a : copy->args) {
    auto r = rename_vars(a, rename);
    if (r != a) {
      a = r;
      changed = true;
    }
  }
  return changed ? copy : e;
}

namespace {

FormulaPtr rename_rec(const FormulaPtr& f, std::set<std::string>& bound,
                      const std::function<std::string(const std::string&)>& rename) {
  switch (f->kind) {
    case FormulaKind::True:
    case FormulaKind::False:
      return f;
    case FormulaKind::Atom: {
      auto e = rename_vars(f->atom, [&](const std::string& n) {
        return bound.count(n) ? n : rename(n);
      });
      return e == f->atom ? f : Formula::make_atom(e);
    }
    case FormulaKind::Exists:
    case FormulaKind::Forall: {
      std::vector<std::string> added;
      for (const auto& v : f->vars)
        if (bound.insert(v.name).second) added.push_back(v.name);
      auto body = rename_rec(f->kids[0], bound, rename);
      for (const auto& v : added) bound.erase(v);
      if (body == f->kids[0]) return f;
      auto copy = std::make_shared<Formula>(*f);
      copy->kids = {body};
      return copy;
    }
    default: {
      auto copy = std::make_shared<Formula>(*f);
      bool changed = false;
      for (auto& k : copy->kids) {
        auto r = rename_rec(k, bound, rename);
        if (r != k) {
          k = r;
          changed = true;
        }
      }
      return changed ? copy : f;
    }
  }
}

}  // namespace

FormulaPtr rename_vars(const FormulaPtr& f,
                       const std::function<std::string(const std::string&)>& rename) {
  std::set<std::string> bound;
  return rename_rec(f, bound, rename);
}

std::string tagged(const std::string& name, const std::string& tag) {
  return name + "$" + tag;
}

FormulaPtr rename_free(const FormulaPtr& f, const std::string& tag,
                       const std::set<std::string>& keep) {
  return rename_vars(f, [&](const std::string& n) {
    return keep.count(n) ? n : tagged(n, tag);
  });
}

ExprPtr substitute(const ExprPtr& target, const std::string& var, const ExprPtr& e) {
  if (target->kind == ExprKind::Var && target->name == var) return e;
  auto copy = std::make_shared<Expr>(*target);
  bool changed = false;
  if ((target->kind == ExprKind::Select || target->kind == ExprKind::Store) &&
      target->name == var) {
    if (e->kind != ExprKind::Var)
      throw std::invalid_argument("cannot substitute a compound term for array " + var);
    copy->name = e->name;
    changed = true;
  }
  for (auto& a : copy->args) {
    auto r = substitute(a, var, e);
    if (r != a) {
      a = r;
      changed = true;
    }
  }
  return changed ? copy : target;
}

FormulaPtr substitute(const FormulaPtr& f, const std::string& var, const ExprPtr& e) {
  switch (f->kind) {
    case FormulaKind::True:
    case FormulaKind::False:
      return f;
    case FormulaKind::Atom: {
      auto r = substitute(f->atom, var, e);
      return r == f->atom ? f : Formula::make_atom(r);
    }
    case FormulaKind::Exists:
    case FormulaKind::Forall: {
      for (const auto& v : f->vars)
        if (v.name == var) return f;
      if (!free_vars(f).count(var)) return f;
      auto incoming = vars_of(e);
      std::vector<BoundVar> vars = f->vars;
      FormulaPtr body = f->kids[0];
      NameSupply supply;
      supply.reserve(incoming);
      supply.reserve(all_names(f));
      supply.reserve(var);
      for (auto& v : vars) {
        if (!incoming.count(v.name)) continue;
        std::string old = v.name;
        std::string fresh = supply.fresh(old);
        body = rename_vars(body, [&](const std::string& n) { return n == old ? fresh : n; });
        v.name = fresh;
      }
      body = substitute(body, var, e);
      return f->kind == FormulaKind::Exists ? Formula::exists(vars, body)
                                            : Formula::forall(vars, body);
    }
    default: {
      auto copy = std::make_shared<Formula>(*f);
      bool changed = false;
      for (auto& k : copy->kids) {
        auto r = substitute(k, var, e);
        if (r != k) {
          k = r;
          changed = true;
        }
      }
      return changed ? copy : f;
    }
  }
}

// ---------------------------------------------------------------------------
// Prenexing and skolemization
// ---------------------------------------------------------------------------

namespace {

bool has_quantifier(const FormulaPtr& f) {
  if (is_quantifier(*f)) return true;
  for (const auto& k : f->kids)
    if (has_quantifier(k)) return true;
  return false;
}

FormulaPtr lift_rec(const FormulaPtr& f, NameSupply& supply, std::vector<BoundVar>& out) {
  switch (f->kind) {
    case FormulaKind::Forall:
      throw std::invalid_argument("universal quantifier cannot be lifted");
    case FormulaKind::Exists: {
      FormulaPtr body = f->kids[0];
      for (const auto& v : f->vars) {
        std::string name = v.name;
        if (supply.taken(name)) {
          name = supply.fresh(v.name);
          const std::string old = v.name;
          body = rename_vars(body, [&](const std::string& n) { return n == old ? name : n; });
        } else {
          supply.reserve(name);
        }
        out.push_back({name, v.sort});
      }
      return lift_rec(body, supply, out);
    }
    case FormulaKind::And:
    case FormulaKind::Or: {
      std::vector<FormulaPtr> kids;
      for (const auto& k : f->kids) kids.push_back(lift_rec(k, supply, out));
      return f->kind == FormulaKind::And ? Formula::conj(kids) : Formula::disj(kids);
    }
    case FormulaKind::Not:
    case FormulaKind::Implies:
      if (has_quantifier(f))
        throw std::invalid_argument("existential in negative position cannot be lifted");
      return f;
    default:
      return f;
  }
}

FormulaPtr skolem_rec(const FormulaPtr& f, bool positive, NameSupply& supply,
                      std::vector<BoundVar>& out) {
  switch (f->kind) {
    case FormulaKind::Exists:
    case FormulaKind::Forall: {
      bool eliminable = (f->kind == FormulaKind::Exists) == positive;
      if (!eliminable) return f;
      FormulaPtr body = f->kids[0];
      for (const auto& v : f->vars) {
        std::string name = v.name;
        if (supply.taken(name)) {
          name = supply.fresh(v.name);
          const std::string old = v.name;
          body = rename_vars(body, [&](const std::string& n) { return n == old ? name : n; });
        } else {
          supply.reserve(name);
        }
        out.push_back({name, v.sort});
      }
      return skolem_rec(body, positive, supply, out);
    }
    case FormulaKind::Not:
      return Formula::negate(skolem_rec(f->kids[0], !positive, supply, out));
    case FormulaKind::Implies:
      return Formula::implies(skolem_rec(f->kids[0], !positive, supply, out),
                              skolem_rec(f->kids[1], positive, supply, out));
    case FormulaKind::And:
    case FormulaKind::Or: {
      std::vector<FormulaPtr> kids;
      for (const auto& k : f->kids) kids.push_back(skolem_rec(k, positive, supply, out));
      return f->kind == FormulaKind::And ? Formula::conj(kids) : Formula::disj(kids);
    }
    default:
      return f;
  }
}

}  // namespace

Prenex lift_existentials(const FormulaPtr& f) {
  NameSupply supply(free_vars(f));
  supply.reserve(applied_symbols(f));
  Prenex out;
  out.body = lift_rec(f, supply, out.vars);
  return out;
}

Prenex skolemize(const FormulaPtr& f, const std::set<std::string>& avoid) {
  NameSupply supply(free_vars(f));
  supply.reserve(avoid);
  supply.reserve(applied_symbols(f));
  Prenex out;
  out.body = skolem_rec(f, true, supply, out.vars);
  return out;
}

// ---------------------------------------------------------------------------
// Simplification
// ---------------------------------------------------------------------------

namespace {

ExprPtr fold(const ExprPtr& e) {
  switch (e->kind) {
    case ExprKind::Const:
    case ExprKind::Var:
      return e;
    default:
      break;
  }
  auto copy = std::make_shared<Expr>(*e);
  bool changed = false;
  for (auto& a : copy->args) {
    auto r = fold(a);
    if (r != a) {
      a = r;
      changed = true;
    }
  }
  const auto& args = copy->args;
  try {
    if (e->kind == ExprKind::Unary && args[0]->kind == ExprKind::Const)
      return Expr::constant(eval_unop(e->unop, args[0]->value));
    if (e->kind == ExprKind::Binary) {
      const auto& l = args[0];
      const auto& r = args[1];
      if (l->kind == ExprKind::Const && r->kind == ExprKind::Const)
        return Expr::constant(eval_binop(e->binop, l->value, r->value));
    }
  } catch (const ArithmeticOverflow&) {
  }
  return changed ? copy : e;
}

FormulaPtr simplify_atom(const ExprPtr& raw) {
  ExprPtr e = fold(raw);
  if (e->kind == ExprKind::Const) return e->value != 0 ? Formula::top() : Formula::bottom();
  if ((e->kind == ExprKind::Binary && is_logical(e->binop)) ||
      (e->kind == ExprKind::Unary && e->unop == UnOp::Not))
    return simplify(from_condition(e));
  if (e->kind == ExprKind::Binary && is_relational(e->binop) && equal(e->args[0], e->args[1])) {
    switch (e->binop) {
      case BinOp::Eq:
      case BinOp::Le:
      case BinOp::Ge:
        return Formula::top();
      default:
        return Formula::bottom();
    }
  }
  return Formula::make_atom(e);
}

/// Flattens and normalizes the kids of an And/Or node. Returns the
/// absorbing constant if one is found.
FormulaPtr junction(FormulaKind kind, const std::vector<FormulaPtr>& raw, bool deep) {
  const FormulaKind unit = kind == FormulaKind::And ? FormulaKind::True : FormulaKind::False;
  const FormulaKind absorbing = kind == FormulaKind::And ? FormulaKind::False : FormulaKind::True;
  std::vector<FormulaPtr> kids;
  std::set<std::string> seen;
  std::vector<FormulaPtr> pending(raw.rbegin(), raw.rend());
  while (!pending.empty()) {
    FormulaPtr k = pending.back();
    pending.pop_back();
    if (deep) k = simplify(k);
    if (k->kind == kind) {
      for (auto it = k->kids.rbegin(); it != k->kids.rend(); ++it) pending.push_back(*it);
      continue;
    }
    if (k->kind == unit) continue;
    if (k->kind == absorbing) return k;
    if (deep) {
      std::string key = alpha_key(k);
      if (!seen.insert(key).second) continue;
    }
    kids.push_back(k);
  }
  if (deep) {
    // x and !x together
    for (const auto& k : kids) {
      if (k->kind == FormulaKind::Not && seen.count(alpha_key(k->kids[0])))
        return kind == FormulaKind::And ? Formula::bottom() : Formula::top();
    }
  }
  return kind == FormulaKind::And ? Formula::conj(kids) : Formula::disj(kids);
}

bool occurs_free(const FormulaPtr& f, const std::string& v) { return free_vars(f).count(v) != 0; }

std::vector<BoundVar> used_vars(const std::vector<BoundVar>& vars, const FormulaPtr& body) {
  auto fv = free_vars(body);
  std::vector<BoundVar> out;
  std::set<std::string> dup;
  // Later duplicates shadow earlier ones; keep the last occurrence.
  for (auto it = vars.rbegin(); it != vars.rend(); ++it) {
    if (!dup.insert(it->name).second) continue;
    if (fv.count(it->name)) out.push_back(*it);
  }
  std::reverse(out.begin(), out.end());
  return out;
}

/// Finds `v == e` (either orientation) with v not occurring in e.
std::optional<ExprPtr> defining_term(const FormulaPtr& f, const std::string& v) {
  if (f->kind != FormulaKind::Atom) return std::nullopt;
  const auto& e = f->atom;
  if (e->kind != ExprKind::Binary || e->binop != BinOp::Eq) return std::nullopt;
  for (int side = 0; side < 2; ++side) {
    const auto& lhs = e->args[side];
    const auto& rhs = e->args[1 - side];
    if (lhs->kind == ExprKind::Var && lhs->name == v && !vars_of(rhs).count(v)) return rhs;
  }
  return std::nullopt;
}

FormulaPtr simplify_exists(std::vector<BoundVar> vars, FormulaPtr body);

FormulaPtr simplify_exists(std::vector<BoundVar> vars, FormulaPtr body) {
  body = simplify(body);
  vars = used_vars(vars, body);
  if (vars.empty()) return body;
  if (body->kind == FormulaKind::Or) {
    std::vector<FormulaPtr> parts;
    for (const auto& d : body->kids) parts.push_back(simplify_exists(vars, d));
    return junction(FormulaKind::Or, parts, true);
  }
  if (body->kind == FormulaKind::Exists) {
    auto merged = vars;
    merged.insert(merged.end(), body->vars.begin(), body->vars.end());
    return simplify_exists(merged, body->kids[0]);
  }

  std::vector<FormulaPtr> cs = conjuncts(body);

  // Pull nested existentials up when their names are not in use around them.
  bool lifted = true;
  while (lifted) {
    lifted = false;
    for (std::size_t i = 0; i < cs.size(); ++i) {
      if (cs[i]->kind != FormulaKind::Exists) continue;
      std::set<std::string> around;
      for (const auto& v : vars) around.insert(v.name);
      for (std::size_t j = 0; j < cs.size(); ++j) {
        if (j == i) continue;
        auto fv = free_vars(cs[j]);
        around.insert(fv.begin(), fv.end());
      }
      bool clash = false;
      for (const auto& v : cs[i]->vars) clash = clash || around.count(v.name);
      if (clash) continue;
      vars.insert(vars.end(), cs[i]->vars.begin(), cs[i]->vars.end());
      auto inner = conjuncts(cs[i]->kids[0]);
      cs.erase(cs.begin() + static_cast<long>(i));
      cs.insert(cs.end(), inner.begin(), inner.end());
      lifted = true;
      break;
    }
  }

  // One-point rule: exists v. (v == e && rest) -> rest[v := e]
  bool eliminated = true;
  while (eliminated) {
    eliminated = false;
    for (std::size_t vi = 0; vi < vars.size() && !eliminated; ++vi) {
      if (vars[vi].sort != Sort::Int) continue;
      const std::string v = vars[vi].name;
      for (std::size_t ci = 0; ci < cs.size(); ++ci) {
        auto def = defining_term(cs[ci], v);
        if (!def) continue;
        std::vector<FormulaPtr> next;
        for (std::size_t j = 0; j < cs.size(); ++j) {
          if (j == ci) continue;
          next.push_back(simplify(substitute(cs[j], v, *def)));
        }
        FormulaPtr joined = junction(FormulaKind::And, next, true);
        if (joined->kind == FormulaKind::False) return joined;
        cs = conjuncts(joined);
        vars.erase(vars.begin() + static_cast<long>(vi));
        eliminated = true;
        break;
      }
    }
  }

  FormulaPtr joined = junction(FormulaKind::And, cs, true);
  vars = used_vars(vars, joined);
  if (vars.empty()) return joined;
  if (joined->kind == FormulaKind::Or) return simplify_exists(vars, joined);

  // Miniscoping: conjuncts that do not mention any bound variable move out,
  // and the rest is split into groups that share no bound variable.
  std::vector<FormulaPtr> all = conjuncts(joined);
  std::vector<std::size_t> group(vars.size());
  for (std::size_t i = 0; i < group.size(); ++i) group[i] = i;
  auto find = [&](std::size_t i) {
    while (group[i] != i) i = group[i] = group[group[i]];
    return i;
  };
  std::vector<std::vector<std::size_t>> uses(all.size());
  for (std::size_t c = 0; c < all.size(); ++c) {
    for (std::size_t v = 0; v < vars.size(); ++v)
      if (occurs_free(all[c], vars[v].name)) uses[c].push_back(v);
    for (std::size_t k = 1; k < uses[c].size(); ++k)
      group[find(uses[c][k])] = find(uses[c][0]);
  }
  std::vector<FormulaPtr> outside;
  std::vector<std::size_t> order;  // group roots by first use
  std::map<std::size_t, std::vector<FormulaPtr>> inside;
  for (std::size_t c = 0; c < all.size(); ++c) {
    if (uses[c].empty()) {
      outside.push_back(all[c]);
      continue;
    }
    std::size_t root = find(uses[c][0]);
    if (!inside.count(root)) order.push_back(root);
    inside[root].push_back(all[c]);
  }
  for (std::size_t root : order) {
    std::vector<BoundVar> bound;
    for (std::size_t v = 0; v < vars.size(); ++v)
      if (find(v) == root) bound.push_back(vars[v]);
    outside.push_back(Formula::exists(bound, Formula::conj(inside[root])));
  }
  return Formula::conj(outside);
}

}  // namespace

std::vector<FormulaPtr> conjuncts(const FormulaPtr& f) {
  if (f->kind == FormulaKind::And) return f->kids;
  if (f->kind == FormulaKind::True) return {};
  return {f};
}

std::vector<FormulaPtr> disjuncts(const FormulaPtr& f) {
  if (f->kind == FormulaKind::Or) {
    std::vector<FormulaPtr> out;
    for (const auto& k : f->kids) {
      auto sub = disjuncts(k);
      out.insert(out.end(), sub.begin(), sub.end());
    }
    return out;
  }
  if (f->kind == FormulaKind::False) return {};
  return {f};
}

std::size_t disjunct_count(const FormulaPtr& f) { return disjuncts(f).size(); }

FormulaPtr simplify(const FormulaPtr& f) {
  switch (f->kind) {
    case FormulaKind::True:
    case FormulaKind::False:
      return f;
    case FormulaKind::Atom:
      return simplify_atom(f->atom);
    case FormulaKind::Not: {
      auto k = simplify(f->kids[0]);
      if (k->kind == FormulaKind::True) return Formula::bottom();
      if (k->kind == FormulaKind::False) return Formula::top();
      if (k->kind == FormulaKind::Not) return k->kids[0];
      return Formula::negate(k);
    }
    case FormulaKind::And:
    case FormulaKind::Or:
      return junction(f->kind, f->kids, true);
    case FormulaKind::Implies: {
      auto a = simplify(f->kids[0]);
      auto b = simplify(f->kids[1]);
      if (a->kind == FormulaKind::False || b->kind == FormulaKind::True) return Formula::top();
      if (a->kind == FormulaKind::True) return b;
      if (b->kind == FormulaKind::False) return simplify(Formula::negate(a));
      if (alpha_equal(a, b)) return Formula::top();
      return Formula::implies(a, b);
    }
    case FormulaKind::Exists:
      return simplify_exists(f->vars, f->kids[0]);
    case FormulaKind::Forall: {
      auto body = simplify(f->kids[0]);
      auto vars = used_vars(f->vars, body);
      return Formula::forall(vars, body);
    }
  }
  return f;
}

FormulaPtr simplify_light(const FormulaPtr& f) {
  switch (f->kind) {
    case FormulaKind::And:
    case FormulaKind::Or: {
      std::vector<FormulaPtr> kids;
      for (const auto& k : f->kids) kids.push_back(simplify_light(k));
      return junction(f->kind, kids, false);
    }
    case FormulaKind::Exists: {
      auto body = simplify_light(f->kids[0]);
      return Formula::exists(used_vars(f->vars, body), body);
    }
    default:
      return f;
  }
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

namespace {

int expr_prec(const ExprPtr& e) {
  if (e->kind == ExprKind::Unary) return 7;
  if (e->kind == ExprKind::Const && e->value < 0) return 7;
  if (e->kind != ExprKind::Binary) return 8;
  switch (e->binop) {
    case BinOp::Or: return 1;
    case BinOp::And: return 2;
    case BinOp::Eq:
    case BinOp::Ne: return 3;
    case BinOp::Lt:
    case BinOp::Gt:
    case BinOp::Le:
    case BinOp::Ge: return 4;
    case BinOp::Add:
    case BinOp::Sub: return 5;
    default: return 6;
  }
}

void print_args(std::ostringstream& os, const std::vector<ExprPtr>& args, std::size_t n);

void print_expr(std::ostringstream& os, const ExprPtr& e, int ctx) {
  int p = expr_prec(e);
  bool paren = p < ctx;
  if (paren) os << '(';
  switch (e->kind) {
    case ExprKind::Const:
      os << e->value;
      break;
    case ExprKind::Var:
      os << e->name;
      break;
    case ExprKind::Select:
      os << e->name << '[';
      print_args(os, e->args, e->args.size());
      os << ']';
      break;
    case ExprKind::Store:
      os << "store(" << e->name;
      for (const auto& a : e->args) {
        os << ", ";
        print_expr(os, a, 0);
      }
      os << ')';
      break;
    case ExprKind::Apply:
      os << e->name << '(';
      print_args(os, e->args, e->args.size());
      os << ')';
      break;
    case ExprKind::Unary:
      os << (e->unop == UnOp::Not ? "!" : "-");
      // `-(1)` keeps negation distinct from the literal -1.
      print_expr(os, e->args[0],
                 e->unop == UnOp::Neg && e->args[0]->kind == ExprKind::Const ? 9 : 7);
      break;
    case ExprKind::Binary: {
      bool relational = is_relational(e->binop);
      print_expr(os, e->args[0], relational ? p + 1 : p);
      os << ' ' << binop_symbol(e->binop) << ' ';
      print_expr(os, e->args[1], p + 1);
      break;
    }
  }
  if (paren) os << ')';
}

void print_args(std::ostringstream& os, const std::vector<ExprPtr>& args, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (i) os << ", ";
    print_expr(os, args[i], 0);
  }
}

const char* sort_suffix(Sort s) {
  switch (s) {
    case Sort::Int: return "";
    case Sort::Array1: return ": [int] int";
    case Sort::Array2: return ": [int, int] int";
  }
  return "";
}

// Formula precedence: quantifiers -1, ==> 0, || 1, && 2, ! 7, atoms by expr.
void print_formula(std::ostringstream& os, const FormulaPtr& f, int ctx) {
  switch (f->kind) {
    case FormulaKind::True:
      os << "true";
      return;
    case FormulaKind::False:
      os << "false";
      return;
    case FormulaKind::Atom:
      print_expr(os, f->atom, ctx);
      return;
    case FormulaKind::Not:
      os << '!';
      print_formula(os, f->kids[0], 8);
      return;
    case FormulaKind::And:
    case FormulaKind::Or: {
      int p = f->kind == FormulaKind::And ? 2 : 1;
      bool paren = p < ctx;
      if (paren) os << '(';
      for (std::size_t i = 0; i < f->kids.size(); ++i) {
        if (i) os << (p == 2 ? " && " : " || ");
        print_formula(os, f->kids[i], p + 1);
      }
      if (paren) os << ')';
      return;
    }
    case FormulaKind::Implies: {
      bool paren = 0 < ctx;
      if (paren) os << '(';
      print_formula(os, f->kids[0], 1);
      os << " ==> ";
      print_formula(os, f->kids[1], 0);
      if (paren) os << ')';
      return;
    }
    case FormulaKind::Exists:
    case FormulaKind::Forall: {
      bool paren = ctx >= 0;
      if (paren) os << '(';
      os << (f->kind == FormulaKind::Exists ? "exists " : "forall ");
      for (std::size_t i = 0; i < f->vars.size(); ++i) {
        if (i) os << ", ";
        os << f->vars[i].name << sort_suffix(f->vars[i].sort);
      }
      os << ". ";
      print_formula(os, f->kids[0], -1);
      if (paren) os << ')';
      return;
    }
  }
}

void sexpr_expr(std::ostringstream& os, const ExprPtr& e) {
  switch (e->kind) {
    case ExprKind::Const:
      if (e->value < 0)
        os << "(- " << static_cast<unsigned long long>(0) - static_cast<unsigned long long>(e->value) << ')';
      else
        os << e->value;
      return;
    case ExprKind::Var:
      os << e->name;
      return;
    case ExprKind::Select:
      os << "(select " << e->name;
      break;
    case ExprKind::Store:
      os << "(store " << e->name;
      break;
    case ExprKind::Apply:
      os << '(' << e->name;
      break;
    case ExprKind::Unary:
      os << (e->unop == UnOp::Not ? "(not" : "(-");
      break;
    case ExprKind::Binary:
      os << '(' << (e->binop == BinOp::Eq ? "=" : binop_symbol(e->binop));
      break;
  }
  for (const auto& a : e->args) {
    os << ' ';
    sexpr_expr(os, a);
  }
  os << ')';
}

void sexpr_formula(std::ostringstream& os, const FormulaPtr& f) {
  switch (f->kind) {
    case FormulaKind::True: os << "true"; return;
    case FormulaKind::False: os << "false"; return;
    case FormulaKind::Atom: sexpr_expr(os, f->atom); return;
    case FormulaKind::Not: os << "(not"; break;
    case FormulaKind::And: os << "(and"; break;
    case FormulaKind::Or: os << "(or"; break;
    case FormulaKind::Implies: os << "(=>"; break;
    case FormulaKind::Exists:
    case FormulaKind::Forall:
      os << (f->kind == FormulaKind::Exists ? "(exists (" : "(forall (");
      for (std::size_t i = 0; i < f->vars.size(); ++i) {
        if (i) os << ' ';
        os << '(' << f->vars[i].name << ' '
           << (f->vars[i].sort == Sort::Int ? "Int" : f->vars[i].sort == Sort::Array1 ? "Array1" : "Array2")
           << ')';
      }
      os << ")";
      break;
  }
  for (const auto& k : f->kids) {
    os << ' ';
    sexpr_formula(os, k);
  }
  os << ')';
}

}  // namespace

std::string to_string(const ExprPtr& e) {
  std::ostringstream os;
  print_expr(os, e, 0);
  return os.str();
}

std::string to_string(const FormulaPtr& f) {
  std::ostringstream os;
  print_formula(os, f, -1);
  return os.str();
}

std::string to_sexpr(const FormulaPtr& f) {
  std::ostringstream os;
  sexpr_formula(os, f);
  return os.str();
}

// ---------------------------------------------------------------------------

std::string base_name(const std::string& name) {
  auto pos = name.find('$');
  return pos == std::string::npos ? name : name.substr(0, pos);
}

std::string NameSupply::fresh(const std::string& base) {
  const std::string b = base_name(base);
  int& n = counters_[b];
  std::string candidate;
  do {
    candidate = b + "$" + std::to_string(++n);
  } while (taken_.count(candidate));
  taken_.insert(candidate);
  return candidate;
}

std::string NameSupply::fresh_plain(const std::string& prefix) {
  int& n = counters_[prefix + "#plain"];
  std::string candidate;
  do {
    candidate = prefix + std::to_string(++n);
  } while (taken_.count(candidate));
  taken_.insert(candidate);
  return candidate;
}

}  // namespace opcheck
