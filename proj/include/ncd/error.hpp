#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ncd {

/// Raised when an input violates a documented precondition.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a time step produces a non-finite state.
class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(double t, std::string norm_name, double norm_value);

  double time() const noexcept { return time_; }
  const std::string& norm_name() const noexcept { return norm_name_; }
  double norm_value() const noexcept { return norm_value_; }

 private:
  double time_;
  std::string norm_name_;
  double norm_value_;
};

/// Fraction of Monte Carlo samples that may blow up before a run fails.
inline constexpr double kExclusionBudget = 0.05;

/// More than kExclusionBudget of the samples blew up.
class ExclusionBudgetError : public std::runtime_error {
 public:
  ExclusionBudgetError(std::size_t excluded, std::size_t samples);

  std::size_t excluded() const noexcept { return excluded_; }
  std::size_t samples() const noexcept { return samples_; }

 private:
  std::size_t excluded_;
  std::size_t samples_;
};

/// Throws ExclusionBudgetError when excluded / samples exceeds the budget.
void check_exclusions(std::size_t excluded, std::size_t samples);

}  // namespace ncd
