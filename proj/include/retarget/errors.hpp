#pragma once

#include <stdexcept>
#include <string>

namespace retarget {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Mismatched dimensions: frame counts, joint counts, array lengths.
struct ShapeError : Error {
  using Error::Error;
};

// Malformed input text; carries a 1-based line number when known.
struct ParseError : Error {
  int line = 0;
  explicit ParseError(const std::string& msg, int line_number = 0)
      : Error(line_number > 0 ? "line " + std::to_string(line_number) + ": " + msg : msg),
        line(line_number) {}
};

// Invalid argument values or degenerate geometry.
struct DomainError : Error {
  using Error::Error;
};

// Non-finite values produced during evaluation.
struct NumericError : Error {
  using Error::Error;
};

}  // namespace retarget
