#include "opcheck/arith.hpp"

#include <limits>

namespace opcheck {

namespace {

[[noreturn]] void overflow(const char* what) {
  throw ArithmeticOverflow(std::string("integer overflow in ") + what);
}

}  // namespace

Int euclid_div(Int a, Int b) {
  if (b == 0) return 0;
  if (a == std::numeric_limits<Int>::min() && b == -1) overflow("division");
  Int q = a / b;
  Int r = a % b;
  if (r < 0) q = b > 0 ? q - 1 : q + 1;
  return q;
}

Int euclid_mod(Int a, Int b) {
  if (b == 0) return 0;
  if (b == -1) return 0;
  Int r = a % b;
  if (r < 0) r += b > 0 ? b : -b;
  return r;
}

Int eval_binop(BinOp op, Int a, Int b) {
  Int out = 0;
  switch (op) {
    case BinOp::Add:
      if (__builtin_add_overflow(a, b, &out)) overflow("addition");
      return out;
    case BinOp::Sub:
      if (__builtin_sub_overflow(a, b, &out)) overflow("subtraction");
      return out;
    case BinOp::Mul:
      if (__builtin_mul_overflow(a, b, &out)) overflow("multiplication");
      return out;
    case BinOp::Div: return euclid_div(a, b);
    case BinOp::Mod: return euclid_mod(a, b);
    case BinOp::Lt: return a < b;
    case BinOp::Gt: return a > b;
    case BinOp::Le: return a <= b;
    case BinOp::Ge: return a >= b;
    case BinOp::Eq: return a == b;
    case BinOp::Ne: return a != b;
    case BinOp::And: return a != 0 && b != 0;
    case BinOp::Or: return a != 0 || b != 0;
  }
  return 0;
}

Int eval_unop(UnOp op, Int a) {
  if (op == UnOp::Not) return a == 0;
  if (a == std::numeric_limits<Int>::min()) overflow("negation");
  return -a;
}

}  // namespace opcheck
