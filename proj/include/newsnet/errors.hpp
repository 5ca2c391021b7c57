#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace newsnet {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Input file absent or unreadable. CLI exit code 2.
class MissingInputError : public Error {
 public:
  explicit MissingInputError(const std::string& path)
      : Error("missing input: " + path), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// Malformed record in an input stream. CLI exit code 3.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Input violates a declared invariant. CLI exit code 3.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(what) {}
};

// Bad or missing configuration. CLI exit code 3.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

// A computation cannot produce a result. CLI exit code 4.
class ComputationError : public Error {
 public:
  explicit ComputationError(const std::string& what) : Error(what) {}
};

// Iterative method failed to converge; carries the last residual.
class ConvergenceError : public ComputationError {
 public:
  ConvergenceError(const std::string& what, double residual)
      : ComputationError(what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

// Requested window extends past the available history.
class InsufficientWindowError : public ComputationError {
 public:
  explicit InsufficientWindowError(const std::string& what) : ComputationError(what) {}
};

}  // namespace newsnet
