#pragma once

/*! \file
    \brief Exception hierarchy shared by all modules.

    Two families map onto the command-line exit codes: input problems
    (validation, domain) and numerical failures (confluence, quadrature,
    convergence, fit, size, eigensolver).
*/

#include <stdexcept>
#include <string>
#include <utility>

namespace heatcoeff {

class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }
  virtual bool is_numeric() const noexcept = 0;

 private:
  std::string kind_;
};

// ----------------------------------------------------------------------------
// input errors

class InputError : public Error {
 public:
  using Error::Error;
  bool is_numeric() const noexcept override { return false; }
};

class ValidationError : public InputError {
 public:
  explicit ValidationError(const std::string& what) : InputError("validation", what) {}
};

class DomainError : public InputError {
 public:
  explicit DomainError(const std::string& what) : InputError("domain", what) {}
};

// ----------------------------------------------------------------------------
// numerical failures

class NumericError : public Error {
 public:
  using Error::Error;
  bool is_numeric() const noexcept override { return true; }
};

class ConfluenceError : public NumericError {
 public:
  explicit ConfluenceError(const std::string& what) : NumericError("confluence", what) {}
};

class QuadratureError : public NumericError {
 public:
  QuadratureError(const std::string& what, double achieved)
      : NumericError("quadrature", what), achieved_(achieved) {}
  double achieved_error() const noexcept { return achieved_; }

 private:
  double achieved_;
};

class ConvergenceError : public NumericError {
 public:
  explicit ConvergenceError(const std::string& what) : NumericError("convergence", what) {}
};

class EvaluationError : public NumericError {
 public:
  explicit EvaluationError(const std::string& what) : NumericError("evaluation", what) {}
};

class FitError : public NumericError {
 public:
  FitError(const std::string& what, double condition)
      : NumericError("fit", what), condition_(condition) {}
  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

class SizeError : public NumericError {
 public:
  explicit SizeError(const std::string& what) : NumericError("size", what) {}
};

class EigenError : public NumericError {
 public:
  explicit EigenError(const std::string& what) : NumericError("eigensolver", what) {}
};

}  // namespace heatcoeff
