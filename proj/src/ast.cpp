#include "opcheck/ast.hpp"

#include <stdexcept>

#include "opcheck/formula.hpp"

namespace opcheck {

ExprPtr Expr::constant(Int v, SourcePos pos) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Const;
  e->value = v;
  e->pos = pos;
  return e;
}

ExprPtr Expr::var(std::string name, SourcePos pos) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Var;
  e->name = std::move(name);
  e->pos = pos;
  return e;
}

ExprPtr Expr::select(std::string array, std::vector<ExprPtr> indices, SourcePos pos) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Select;
  e->name = std::move(array);
  e->args = std::move(indices);
  e->pos = pos;
  return e;
}

ExprPtr Expr::store(std::string array, std::vector<ExprPtr> indices, ExprPtr value) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Store;
  e->name = std::move(array);
  e->args = std::move(indices);
  e->args.push_back(std::move(value));
  return e;
}

ExprPtr Expr::apply(std::string proc, std::vector<ExprPtr> args, SourcePos pos) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Apply;
  e->name = std::move(proc);
  e->args = std::move(args);
  e->pos = pos;
  return e;
}

ExprPtr Expr::unary(UnOp op, ExprPtr operand, SourcePos pos) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Unary;
  e->unop = op;
  e->args = {std::move(operand)};
  e->pos = pos;
  return e;
}

ExprPtr Expr::binary(BinOp op, ExprPtr lhs, ExprPtr rhs, SourcePos pos) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Binary;
  e->binop = op;
  e->args = {std::move(lhs), std::move(rhs)};
  e->pos = pos;
  return e;
}

bool is_relational(BinOp op) {
  switch (op) {
    case BinOp::Lt:
    case BinOp::Gt:
    case BinOp::Le:
    case BinOp::Ge:
    case BinOp::Eq:
    case BinOp::Ne:
      return true;
    default:
      return false;
  }
}

bool is_logical(BinOp op) { return op == BinOp::And || op == BinOp::Or; }

const char* binop_symbol(BinOp op) {
  switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "/";
    case BinOp::Mod: return "%";
    case BinOp::Lt: return "<";
    case BinOp::Gt: return ">";
    case BinOp::Le: return "<=";
    case BinOp::Ge: return ">=";
    case BinOp::Eq: return "==";
    case BinOp::Ne: return "!=";
    case BinOp::And: return "&&";
    case BinOp::Or: return "||";
  }
  return "?";
}

bool equal(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind || a->args.size() != b->args.size()) return false;
  switch (a->kind) {
    case ExprKind::Const:
      return a->value == b->value;
    case ExprKind::Var:
      return a->name == b->name;
    case ExprKind::Unary:
      if (a->unop != b->unop) return false;
      break;
    case ExprKind::Binary:
      if (a->binop != b->binop) return false;
      break;
    case ExprKind::Select:
    case ExprKind::Store:
    case ExprKind::Apply:
      if (a->name != b->name) return false;
      break;
  }
  for (std::size_t i = 0; i < a->args.size(); ++i)
    if (!equal(a->args[i], b->args[i])) return false;
  return true;
}

void collect_vars(const ExprPtr& e, std::set<std::string>& out) {
  if (!e) return;
  switch (e->kind) {
    case ExprKind::Var:
    case ExprKind::Select:
    case ExprKind::Store:
      out.insert(e->name);
      break;
    default:
      break;
  }
  for (const auto& a : e->args) collect_vars(a, out);
}

std::set<std::string> vars_of(const ExprPtr& e) {
  std::set<std::string> out;
  collect_vars(e, out);
  return out;
}

void collect_applied(const ExprPtr& e, std::set<std::string>& out) {
  if (!e) return;
  if (e->kind == ExprKind::Apply) out.insert(e->name);
  for (const auto& a : e->args) collect_applied(a, out);
}

// ---------------------------------------------------------------------------

StmtPtr Stmt::assign(std::string target, ExprPtr value, SourcePos pos) {
  auto s = std::make_shared<Stmt>();
  s->kind = StmtKind::Assign;
  s->target = std::move(target);
  s->value = std::move(value);
  s->pos = pos;
  return s;
}

StmtPtr Stmt::array_assign(std::string target, std::vector<ExprPtr> indices,
                           ExprPtr value, SourcePos pos) {
  auto s = std::make_shared<Stmt>();
  s->kind = StmtKind::ArrayAssign;
  s->target = std::move(target);
  s->indices = std::move(indices);
  s->value = std::move(value);
  s->pos = pos;
  return s;
}

StmtPtr Stmt::call(std::string target, std::string callee, std::vector<ExprPtr> args,
                   SourcePos pos) {
  auto s = std::make_shared<Stmt>();
  s->kind = StmtKind::Call;
  s->target = std::move(target);
  s->callee = std::move(callee);
  s->args = std::move(args);
  s->pos = pos;
  return s;
}

StmtPtr Stmt::block(std::vector<StmtPtr> body, SourcePos pos) {
  auto s = std::make_shared<Stmt>();
  s->kind = StmtKind::Block;
  s->body = std::move(body);
  s->pos = pos;
  return s;
}

StmtPtr Stmt::if_(ExprPtr cond, StmtPtr then_branch, StmtPtr else_branch, SourcePos pos) {
  auto s = std::make_shared<Stmt>();
  s->kind = StmtKind::If;
  s->value = std::move(cond);
  s->body = {std::move(then_branch), std::move(else_branch)};
  s->pos = pos;
  return s;
}

StmtPtr Stmt::ret(std::string var, SourcePos pos) {
  auto s = std::make_shared<Stmt>();
  s->kind = StmtKind::Return;
  s->target = std::move(var);
  s->pos = pos;
  return s;
}

StmtPtr Stmt::skip(SourcePos pos) {
  auto s = std::make_shared<Stmt>();
  s->kind = StmtKind::Skip;
  s->pos = pos;
  return s;
}

StmtPtr Stmt::havoc(std::string var) {
  auto s = std::make_shared<Stmt>();
  s->kind = StmtKind::Havoc;
  s->target = std::move(var);
  return s;
}

StmtPtr Stmt::assume(FormulaPtr f, std::optional<CallOrigin> origin) {
  auto s = std::make_shared<Stmt>();
  s->kind = StmtKind::Assume;
  s->formula = std::move(f);
  s->origin = std::move(origin);
  return s;
}

StmtPtr Stmt::assert_(FormulaPtr f, int site) {
  auto s = std::make_shared<Stmt>();
  s->kind = StmtKind::Assert;
  s->formula = std::move(f);
  s->site = site;
  return s;
}

static bool equal_exprs(const std::vector<ExprPtr>& a, const std::vector<ExprPtr>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!equal(a[i], b[i])) return false;
  return true;
}

bool equal(const StmtPtr& a, const StmtPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind || a->target != b->target || a->callee != b->callee)
    return false;
  if (!equal_exprs(a->indices, b->indices) || !equal_exprs(a->args, b->args))
    return false;
  if ((a->value == nullptr) != (b->value == nullptr)) return false;
  if (a->value && !equal(a->value, b->value)) return false;
  if ((a->formula == nullptr) != (b->formula == nullptr)) return false;
  if (a->formula && !equal(a->formula, b->formula)) return false;
  if (a->body.size() != b->body.size()) return false;
  for (std::size_t i = 0; i < a->body.size(); ++i)
    if (!equal(a->body[i], b->body[i])) return false;
  return true;
}

int array_rank(VarKind k) {
  switch (k) {
    case VarKind::Scalar: return 0;
    case VarKind::Array1: return 1;
    case VarKind::Array2: return 2;
  }
  return 0;
}

std::string Procedure::return_var() const {
  if (!body || body->body.empty() || body->body.back()->kind != StmtKind::Return)
    throw std::logic_error("procedure " + name + " has no trailing return");
  return body->body.back()->target;
}

const GlobalDecl* Library::find_global(const std::string& name) const {
  for (const auto& g : globals)
    if (g.name == name) return &g;
  return nullptr;
}

const Procedure* Library::find_procedure(const std::string& name) const {
  for (const auto& p : procedures)
    if (p.name == name) return &p;
  return nullptr;
}

static void collect_assigned(const StmtPtr& s, std::set<std::string>& out) {
  if (!s) return;
  switch (s->kind) {
    case StmtKind::Assign:
    case StmtKind::ArrayAssign:
    case StmtKind::Call:
    case StmtKind::Havoc:
      out.insert(s->target);
      break;
    default:
      break;
  }
  for (const auto& c : s->body) collect_assigned(c, out);
}

std::set<std::string> Library::mutable_globals() const {
  std::set<std::string> assigned;
  for (const auto& p : procedures) collect_assigned(p.body, assigned);
  std::set<std::string> out;
  for (const auto& g : globals)
    if (assigned.count(g.name)) out.insert(g.name);
  return out;
}

bool equal(const Library& a, const Library& b) {
  if (a.globals.size() != b.globals.size() ||
      a.procedures.size() != b.procedures.size())
    return false;
  for (std::size_t i = 0; i < a.globals.size(); ++i) {
    const auto& x = a.globals[i];
    const auto& y = b.globals[i];
    if (x.name != y.name || x.kind != y.kind || x.init != y.init) return false;
  }
  for (std::size_t i = 0; i < a.procedures.size(); ++i) {
    const auto& x = a.procedures[i];
    const auto& y = b.procedures[i];
    if (x.name != y.name || x.params != y.params) return false;
    if ((x.invariant == nullptr) != (y.invariant == nullptr)) return false;
    if (x.invariant && !equal(x.invariant, y.invariant)) return false;
    if (!equal(x.body, y.body)) return false;
  }
  return true;
}

static void collect_names(const StmtPtr& s, std::set<std::string>& out) {
  if (!s) return;
  if (!s->target.empty()) out.insert(s->target);
  if (!s->callee.empty()) out.insert(s->callee);
  for (const auto& e : s->indices) {
    collect_vars(e, out);
    collect_applied(e, out);
  }
  for (const auto& e : s->args) {
    collect_vars(e, out);
    collect_applied(e, out);
  }
  if (s->value) {
    collect_vars(s->value, out);
    collect_applied(s->value, out);
  }
  if (s->formula) {
    auto names = all_names(s->formula);
    out.insert(names.begin(), names.end());
  }
  for (const auto& c : s->body) collect_names(c, out);
}

std::set<std::string> names_in(const StmtPtr& s) {
  std::set<std::string> out;
  collect_names(s, out);
  return out;
}

std::set<std::string> locals_of(const Library& lib, const Procedure& p) {
  std::set<std::string> out(p.params.begin(), p.params.end());
  std::set<std::string> assigned;
  collect_assigned(p.body, assigned);
  for (const auto& n : names_in(p.body)) {
    if (lib.is_global(n) || lib.find_procedure(n)) continue;
    out.insert(n);
  }
  for (const auto& n : assigned)
    if (!lib.is_global(n)) out.insert(n);
  return out;
}

}  // namespace opcheck
