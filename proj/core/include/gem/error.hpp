#pragma once

#include <stdexcept>
#include <string>

namespace gem {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller supplied arguments that violate a documented precondition
/// (shape or type mismatch, out-of-range parameter, bad file contents).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Geometry for which a quantity is undefined: isolated vertices,
/// cancelling face normals, edges parallel to the normal, antiparallel
/// normals across an edge, degenerate variance in an audit.
class DegenerateGeometry : public Error {
 public:
  using Error::Error;
};

/// Text input that could not be parsed. Carries the 1-based line number.
class ParseError : public InvalidArgument {
 public:
  ParseError(std::size_t line, const std::string& what)
      : InvalidArgument("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace gem
