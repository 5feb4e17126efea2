#include "ncd/error.hpp"

#include <sstream>
#include <string>

namespace ncd {

namespace {

std::string describe(double t, const std::string& norm_name, double value) {
  std::ostringstream os;
  os << "numerical blow-up at t=" << t << ": " << norm_name << " = " << value;
  return os.str();
}

}  // namespace

BlowUpError::BlowUpError(double t, std::string norm_name, double norm_value)
    : std::runtime_error(describe(t, norm_name, norm_value)),
      time_(t),
      norm_name_(std::move(norm_name)),
      norm_value_(norm_value) {}

ExclusionBudgetError::ExclusionBudgetError(std::size_t excluded, std::size_t samples)
    : std::runtime_error(std::to_string(excluded) + " of " + std::to_string(samples) +
                         " samples blew up, above the 5% exclusion budget"),
      excluded_(excluded),
      samples_(samples) {}

void check_exclusions(std::size_t excluded, std::size_t samples) {
  if (static_cast<double>(excluded) > kExclusionBudget * static_cast<double>(samples)) {
    throw ExclusionBudgetError(excluded, samples);
  }
}

}  // namespace ncd
