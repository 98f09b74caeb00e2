#pragma once

// Exact safety metrics for small platoons by enumerating every follower
// capability combination, and the Monte Carlo cross-check built on it.

#include <cstddef>
#include <cstdint>
#include <string>

#include "platoon/dynamics.hpp"
#include "platoon/montecarlo.hpp"
#include "platoon/stochastic.hpp"

namespace platoon {

inline constexpr std::size_t kEnumerationBudget = 1'000'000;

struct ExactMetrics {
  double P = 0.0;
  double n_expected = 0.0;
  double s_sum = 0.0;
  double s_per_collision = 0.0;
  double total_weight = 0.0;      // sum of combination probabilities
  std::size_t combinations = 0;   // m^N
  std::size_t simulated = 0;      // combinations with nonzero probability
};

// Number of combinations m^N, or BudgetError if it exceeds the budget.
std::size_t enumeration_size(std::size_t support, std::size_t followers,
                             std::size_t budget = kEnumerationBudget);

// OpenMP kernel and serial reference; identical results.
ExactMetrics enumerate_exact(const ScenarioConfig& cfg,
                             const DecelDistribution& dist,
                             double leader_decel, int threads = 0);
ExactMetrics enumerate_exact_serial(const ScenarioConfig& cfg,
                                    const DecelDistribution& dist,
                                    double leader_decel);

struct OracleReport {
  ExactMetrics exact;
  SafetyMetrics mc;
  std::size_t followers = 0;
  double delta = 0.01;
  double eps = 0.0;        // Hoeffding half-width at (n, delta)
  double err_P = 0.0;
  double err_N = 0.0;      // |difference| / N, a [0, 1]-bounded quantity
  double err_S_sum = 0.0;  // reported, not gated (unbounded variable)
  double err_S_per_collision = 0.0;
  bool pass = false;

  std::string to_text() const;
};

OracleReport mc_vs_oracle(const ScenarioConfig& cfg,
                          const DecelDistribution& dist, double leader_decel,
                          long n, std::uint64_t seed, double delta = 0.01,
                          int threads = 0);

}  // namespace platoon
