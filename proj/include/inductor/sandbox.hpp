#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "inductor/value.hpp"

namespace inductor::sandbox {

// Raised during parsing; position is a byte offset into the source.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, size_t position)
      : std::runtime_error(msg + " (at offset " + std::to_string(position) + ")"),
        position_(position) {}
  size_t position() const { return position_; }

 private:
  size_t position_;
};

// Raised during evaluation; always folded into a RuleFailure by callers.
class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { IntLit, BoolLit, Var, Unary, Binary, If, Lambda, Call };
  Kind kind;
  long long int_value = 0;
  bool bool_value = false;
  std::string name;          // Var / Call / Lambda parameter / operator text
  std::vector<ExprPtr> args; // operands, call arguments, if branches, lambda body
};

struct Program {
  std::string source;
  ExprPtr ast;
  bool uses_list_input = false;  // references xs
  bool uses_grid_input = false;  // references g
};

struct Limits {
  long long max_steps = 100000;
  int max_depth = 64;
  long long max_output_cells = 4096;
};

// Parses the expression language over one bound input variable (`xs` for
// lists, `g` for grids). Unknown identifiers and unknown builtins are parse
// errors.
Program parse_program(const std::string& source);

// Pure evaluation with resource limits; returns an IntList or IntGrid.
// Throws EvalError on step/depth/size limit, type errors, bad indices,
// division by zero, or a result that is not a list of ints or a grid.
Value eval_program(const Program& p, const Value& input, const Limits& limits = {});

// The language reference shipped as docs and embedded in the translation prompt.
const std::string& language_reference();

}  // namespace inductor::sandbox
