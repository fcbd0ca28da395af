#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace kylepen {

// Bad user input (parameters, config, out-of-range arguments).
class InvalidArgument : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// An integral-operator evaluation left its domain of reliability
// (membership test for D(T1)/D(T2)).
class DomainError : public std::domain_error {
  using std::domain_error::domain_error;
};

// Overflow / non-finite intermediate in a numerical routine.
class NumericalError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Fixed-point iteration hit max_iter; carries the residual trace.
class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& msg, std::vector<double> history)
      : std::runtime_error(msg), residual_history(std::move(history)) {}

  std::vector<double> residual_history;
};

}  // namespace kylepen
