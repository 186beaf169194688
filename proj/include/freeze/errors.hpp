#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace freeze {

// Invalid parameters or malformed input. Maps to CLI exit code 1.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
  ConfigError(const std::string& what, std::vector<std::string> problems)
      : std::invalid_argument(what), problems_(std::move(problems)) {}
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

// Numerical failure of a well-posed request. Maps to CLI exit code 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Series evaluated at or below its abscissa of convergence.
class DivergentSeries : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// More than the allowed number of explicit terms would be needed.
class TruncationCapExceeded : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Iterative method hit its cap before reaching the requested accuracy.
class NonConvergence : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Pressure root lies below the smallest representable excess (very large beta).
class OutOfRange : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace freeze
