#pragma once

#include <stdexcept>
#include <string>

namespace admg {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed graph or parameter text.  `line` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(int line, const std::string& what)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class UnknownVertex : public Error {
 public:
  explicit UnknownVertex(const std::string& label) : Error("unknown vertex '" + label + "'"), label_(label) {}
  const std::string& label() const { return label_; }

 private:
  std::string label_;
};

/// A graph-level invariant does not hold (cyclic graph, head collision, ...).
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// A required q-parameter entry is absent or out of range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Positivity violations, unnormalized tables, negative Mobius sums.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace admg
