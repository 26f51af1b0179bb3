#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "philap/errors.hpp"

namespace philap {

// A parsed arithmetic expression in one free variable.
//
// Grammar (precedence low to high): + -  |  * /  |  unary -  |  ^ (right
// assoc)  |  literals, the variable, abs/log/exp/sqrt, min/max (n-ary),
// parentheses, and piecewise definitions of the form
//
//      piece(a<=t<b : expr ; b<=t<c : expr ; ...)
//
// Piece intervals are half-open [a,b); the final piece also owns its right
// endpoint when finite. `inf` is accepted as an interval bound. Expressions
// are immutable after parse and evaluation is pure, so instances may be
// shared freely across threads.
class Expression {
 public:
  Expression() = default;

  // Throws ParseError on malformed input, unknown identifiers, or
  // overlapping piece intervals.
  static Expression parse(std::string_view source, std::string_view var_name);

  // Throws EvalError on domain violations (log of a non-positive value,
  // division by zero, a point not covered by any piece, ...) and on
  // non-finite results.
  double operator()(double x) const;

  bool valid() const { return root_ != nullptr; }
  const std::string& source() const { return source_; }
  const std::string& variable() const { return var_; }

  struct Node;

 private:
  std::shared_ptr<const Node> root_;
  std::string source_;
  std::string var_;
};

// Whole-token replacement of identifier `name` by "(replacement)" inside an
// expression source string. Used for config parameter substitution and for
// the annular change of variables.
std::string substitute_identifier(std::string_view source, std::string_view name,
                                  std::string_view replacement);

}  // namespace philap
