#pragma once

#include <stdexcept>

#include "opcheck/ast.hpp"

namespace opcheck {

/// Raised when a concrete computation leaves the 64-bit range. Program
/// integers are mathematical; the interpreter reports this instead of
/// wrapping.
struct ArithmeticOverflow : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Euclidean division: the remainder is always non-negative. Division and
/// remainder by zero yield 0, matching the solver encoding.
Int euclid_div(Int a, Int b);
Int euclid_mod(Int a, Int b);

Int eval_binop(BinOp op, Int a, Int b);
Int eval_unop(UnOp op, Int a);

}  // namespace opcheck
