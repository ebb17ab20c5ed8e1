#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace stablereg {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed textual input.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Structurally invalid data (bad vertex ids, overlapping pieces, mismatched graphs).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A named hypothesis of an operation does not hold.
class PreconditionError : public Error {
 public:
  PreconditionError(std::string condition, const std::string& detail)
      : Error(condition + ": " + detail), condition_(std::move(condition)) {}
  const std::string& condition() const { return condition_; }

 private:
  std::string condition_;
};

// The input is too small for the requested parameters.
class SizingError : public PreconditionError {
 public:
  SizingError(const std::string& detail, std::size_t threshold)
      : PreconditionError("sizing", detail + " (need n >= " + std::to_string(threshold) + ")"),
        threshold_(threshold) {}
  std::size_t threshold() const { return threshold_; }

 private:
  std::size_t threshold_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class BudgetExhausted : public Error {
 public:
  explicit BudgetExhausted(const std::string& what) : Error("search budget exhausted: " + what) {}
};

class RetryExhausted : public Error {
 public:
  explicit RetryExhausted(const std::string& what) : Error("retries exhausted: " + what) {}
};

// A produced object fails one of its own post-conditions.
class VerificationFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace stablereg
