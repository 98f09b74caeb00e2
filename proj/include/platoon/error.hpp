#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace platoon {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or out-of-range input: config files, distributions, scenario
// parameters.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class DistributionError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// Scaled acceleration gain outside (0, 1), or gains outside the admissible
// string-stability region when that is enforced.
class InfeasibleGainError : public Error {
 public:
  using Error::Error;
};

// A single trajectory left the numerically sane range.
class DivergenceError : public Error {
 public:
  DivergenceError(long step, const std::string& what)
      : Error(what), step_(step) {}
  long step() const { return step_; }

 private:
  long step_;
};

// Divergence inside a campaign, tagged with where it happened.
class CampaignError : public Error {
 public:
  CampaignError(double leader_decel, std::size_t iteration, long step,
                const std::string& what)
      : Error(what),
        leader_decel_(leader_decel),
        iteration_(iteration),
        step_(step) {}
  double leader_decel() const { return leader_decel_; }
  std::size_t iteration() const { return iteration_; }
  long step() const { return step_; }

 private:
  double leader_decel_;
  std::size_t iteration_;
  long step_;
};

// Exhaustive enumeration would exceed its combination budget.
class BudgetError : public Error {
 public:
  using Error::Error;
};

}  // namespace platoon
