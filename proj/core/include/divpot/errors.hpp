#pragma once

#include <stdexcept>
#include <string>

namespace divpot {

/// Coarse error category; the CLI maps these onto its exit codes.
enum class ErrorKind { validation = 1, io = 2, numeric = 3 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(ErrorKind::validation, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(ErrorKind::numeric, what) {}
};

/// Malformed input row. `line` is 1-based and counts the header.
class ParseError : public ValidationError {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& detail)
      : ValidationError(source + ":" + std::to_string(line) + ": " + detail), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IncompleteDataError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class EmptyUniverseError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class InsufficientDataError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class CoverageError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// A return column with zero sample variance.
class DegenerateColumnError : public NumericError {
 public:
  explicit DegenerateColumnError(const std::string& ticker)
      : NumericError("degenerate column: '" + ticker + "' has zero variance"), ticker_(ticker) {}
  const std::string& ticker() const noexcept { return ticker_; }

 private:
  std::string ticker_;
};

class SingularMatrixError : public NumericError {
 public:
  explicit SingularMatrixError(double rcond)
      : NumericError("correlation matrix is singular or ill-conditioned (reciprocal condition estimate " +
                     std::to_string(rcond) + ")"),
        rcond_(rcond) {}
  double rcond() const noexcept { return rcond_; }

 private:
  double rcond_;
};

class UndefinedStatisticError : public NumericError {
 public:
  using NumericError::NumericError;
};

class ConvergenceError : public NumericError {
 public:
  ConvergenceError(const std::string& what, int iterations)
      : NumericError(what + " after " + std::to_string(iterations) + " sweeps"), iterations_(iterations) {}
  int iterations() const noexcept { return iterations_; }

 private:
  int iterations_;
};

class DegeneratePortfolioError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace divpot
