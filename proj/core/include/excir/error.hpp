#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace excir {

// Base of every error the library throws. The CLI maps the subclasses onto
// exit codes: InputError -> 2, DegenerateInformationError -> 3, others -> 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed files, bad flags, contract violations on user-supplied data.
class InputError : public Error {
 public:
  using Error::Error;
};

// A ratio whose numerator and denominator both vanish (0/0 PCIR or MCIR).
class DegenerateInformationError : public Error {
 public:
  using Error::Error;
};

// The black-box model failed or broke its one-prediction-per-row contract.
class EvaluationError : public Error {
 public:
  EvaluationError(const std::string& what, std::size_t row)
      : Error(what + " (row " + std::to_string(row) + ")"), row_(row) {}

  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

// A ratio-model row whose denominator sum is zero.
class SingularRowError : public Error {
 public:
  using Error::Error;
};

// Operand dimensions or lengths disagree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

}  // namespace excir
