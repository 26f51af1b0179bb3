#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace philap {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed expression or config text. Carries a 0-based character position.
struct ParseError : Error {
  ParseError(const std::string& what, std::size_t pos)
      : Error(what + " (at position " + std::to_string(pos) + ")"), position(pos) {}
  std::size_t position;
};

// Evaluation outside an expression's domain, or a non-finite result.
struct EvalError : Error {
  using Error::Error;
};

// A problem-definition invariant failed (bad coefficients, inadmissible weight, ...).
struct InvariantError : Error {
  using Error::Error;
};

// A required numerical quantity did not converge.
struct NumericalError : Error {
  using Error::Error;
};

}  // namespace philap
