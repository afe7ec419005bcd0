#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace opcheck {

using Int = std::int64_t;

struct SourcePos {
  int line = 0;
  int column = 0;
};

// ---------------------------------------------------------------------------
// Expressions
// ---------------------------------------------------------------------------

enum class ExprKind { Const, Var, Select, Store, Apply, Unary, Binary };

enum class UnOp { Not, Neg };

enum class BinOp { Add, Sub, Mul, Div, Mod, Lt, Gt, Le, Ge, Eq, Ne, And, Or };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Side-effect free integer expression. Comparison and logical operators
/// yield 0 or 1; any non-zero value is truthy.
///
/// `Select` reads `name[args...]`. `Store` is the array value obtained from
/// array variable `name` by writing `args.back()` at indices
/// `args[0..n-1)`; it only appears in generated formulas. `Apply` is an
/// application of a procedure symbol and only appears in formulas.
struct Expr {
  ExprKind kind = ExprKind::Const;
  Int value = 0;
  std::string name;
  UnOp unop = UnOp::Not;
  BinOp binop = BinOp::Add;
  std::vector<ExprPtr> args;
  SourcePos pos;

  static ExprPtr constant(Int v, SourcePos pos = {});
  static ExprPtr var(std::string name, SourcePos pos = {});
  static ExprPtr select(std::string array, std::vector<ExprPtr> indices,
                        SourcePos pos = {});
  static ExprPtr store(std::string array, std::vector<ExprPtr> indices,
                       ExprPtr value);
  static ExprPtr apply(std::string proc, std::vector<ExprPtr> args,
                       SourcePos pos = {});
  static ExprPtr unary(UnOp op, ExprPtr operand, SourcePos pos = {});
  static ExprPtr binary(BinOp op, ExprPtr lhs, ExprPtr rhs, SourcePos pos = {});
};

bool is_relational(BinOp op);
bool is_logical(BinOp op);
const char* binop_symbol(BinOp op);

/// Structural equality, ignoring source positions.
bool equal(const ExprPtr& a, const ExprPtr& b);

/// Names of variables (scalars and arrays) read by `e`.
void collect_vars(const ExprPtr& e, std::set<std::string>& out);
std::set<std::string> vars_of(const ExprPtr& e);
/// Names of procedure symbols applied in `e`.
void collect_applied(const ExprPtr& e, std::set<std::string>& out);

// ---------------------------------------------------------------------------
// Statements
// ---------------------------------------------------------------------------

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

enum class StmtKind {
  Assign,       // target := value
  ArrayAssign,  // target[indices] := value
  Call,         // target := callee(args)
  Block,        // body[0]; body[1]; ...
  If,           // if (cond) body[0] else body[1]
  Return,       // return target
  Skip,
  Havoc,        // havoc(target)
  Assume,       // assume formula
  Assert,       // assert formula
};

struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;

/// Set on the Assume node that replaced a call in a transformed body so the
/// original call remains recoverable.
struct CallOrigin {
  std::string lhs;
  std::string callee;
  std::vector<std::string> args;
};

struct Stmt {
  StmtKind kind = StmtKind::Skip;
  std::string target;
  std::vector<ExprPtr> indices;
  ExprPtr value;  // rhs of assignments, condition of If
  std::string callee;
  std::vector<ExprPtr> args;
  std::vector<StmtPtr> body;
  FormulaPtr formula;
  int site = -1;  // Assert site number in transformed bodies
  std::optional<CallOrigin> origin;
  SourcePos pos;

  static StmtPtr assign(std::string target, ExprPtr value, SourcePos pos = {});
  static StmtPtr array_assign(std::string target, std::vector<ExprPtr> indices,
                              ExprPtr value, SourcePos pos = {});
  static StmtPtr call(std::string target, std::string callee,
                      std::vector<ExprPtr> args, SourcePos pos = {});
  static StmtPtr block(std::vector<StmtPtr> body, SourcePos pos = {});
  static StmtPtr if_(ExprPtr cond, StmtPtr then_branch, StmtPtr else_branch,
                     SourcePos pos = {});
  static StmtPtr ret(std::string var, SourcePos pos = {});
  static StmtPtr skip(SourcePos pos = {});
  static StmtPtr havoc(std::string var);
  static StmtPtr assume(FormulaPtr f, std::optional<CallOrigin> origin = {});
  static StmtPtr assert_(FormulaPtr f, int site);
};

bool equal(const StmtPtr& a, const StmtPtr& b);

// ---------------------------------------------------------------------------
// Declarations
// ---------------------------------------------------------------------------

enum class VarKind { Scalar, Array1, Array2 };

int array_rank(VarKind k);

struct GlobalDecl {
  std::string name;
  VarKind kind = VarKind::Scalar;
  Int init = 0;  // scalar value, or the default of every array cell
  SourcePos pos;
};

struct Procedure {
  std::string name;
  std::vector<std::string> params;
  StmtPtr body;  // Block whose last statement is the Return
  FormulaPtr invariant;  // null when not annotated
  SourcePos pos;

  /// Variable named by the trailing return statement.
  std::string return_var() const;
};

struct Library {
  std::vector<GlobalDecl> globals;
  std::vector<Procedure> procedures;

  const GlobalDecl* find_global(const std::string& name) const;
  const Procedure* find_procedure(const std::string& name) const;
  bool is_global(const std::string& name) const {
    return find_global(name) != nullptr;
  }

  /// Globals that some procedure assigns (directly or as a call target).
  /// Globals outside this set keep their initial value forever.
  std::set<std::string> mutable_globals() const;
};

bool equal(const Library& a, const Library& b);

/// Every identifier that occurs in the procedure body (locals, formals,
/// globals, callees).
std::set<std::string> names_in(const StmtPtr& s);

/// Locals of a procedure: formals plus every assigned non-global name.
std::set<std::string> locals_of(const Library& lib, const Procedure& p);

}  // namespace opcheck
