#pragma once

// Monte Carlo estimation of platoon safety metrics under emergency braking.
//
// For every leader deceleration D0 in the sweep, n iterations draw i.i.d.
// follower capabilities, simulate one trajectory each and aggregate
//   P      = (# iterations with a collision) / n
//   N      = sum_i CS(i) / n
//   S_sum  = sum_i RV(i) / n
//   S_coll = sum_i [RV(i) / CS(i)] / n   (0 for collision-free iterations)
//
// run_campaign is the OpenMP kernel; run_campaign_serial is the reference
// implementation it is tested against. Both produce bit-identical results.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "platoon/dynamics.hpp"
#include "platoon/stochastic.hpp"

namespace platoon {

// Smallest n with 2 exp(-2 n eps^2) <= delta.
long hoeffding_min_samples(double eps, double delta);
// Half-width eps guaranteed at confidence 1 - delta after n samples.
double hoeffding_epsilon(long n, double delta);

struct CampaignConfig {
  ScenarioConfig scenario;  // leader_decel is overridden by the sweep
  DecelDistribution dist = DecelDistribution::uniform(
      DecelDistribution::default_support());
  long iterations = 2000;
  std::uint64_t seed = 1;
  std::vector<double> leader_sweep;  // empty = the distribution's support
  int threads = 0;                   // 0 = OpenMP default

  std::vector<double> resolved_sweep() const;
  // Throws ConfigError on out-of-range settings.
  void validate() const;
};

struct SafetyMetrics {
  double leader_decel = 0.0;
  double P = 0.0;
  double n_expected = 0.0;
  double s_sum = 0.0;
  double s_per_collision = 0.0;
  long n = 0;
  std::uint64_t seed = 0;

  bool operator==(const SafetyMetrics&) const = default;
};

// Order-fixed reduction of per-iteration outcomes.
SafetyMetrics aggregate(std::span<const IterationOutcome> outcomes,
                        double leader_decel, std::uint64_t seed);

// Sweep point k draws its capability matrix from Philox stream k, so
// variants that share (seed, sweep) see identical draws.
std::vector<SafetyMetrics> run_campaign(const CampaignConfig& cfg);
std::vector<SafetyMetrics> run_campaign_serial(const CampaignConfig& cfg);

// Per-iteration outcomes at one sweep point; used by the oracle and the
// trajectory dump.
std::vector<IterationOutcome> run_sweep_point(const CampaignConfig& cfg,
                                              std::size_t sweep_index);

struct Variant {
  int r = 1;
  double d = 6.0;

  bool operator==(const Variant&) const = default;
};

struct MetricsDelta {
  double leader_decel;
  double dP, dN, dS_sum, dS_per_collision;  // b - a
};

struct ComparisonTable {
  std::vector<Variant> variants;
  std::vector<std::vector<SafetyMetrics>> metrics;  // [variant][sweep]

  std::vector<MetricsDelta> delta(std::size_t a, std::size_t b) const;
};

// Runs every config and aligns the results. Configs must agree on seed,
// iterations, distribution, sweep and everything in the scenario except r
// and d; otherwise throws ConfigError.
ComparisonTable compare_topologies(std::span<const CampaignConfig> cfgs);

// Base config with (r, d) replaced.
CampaignConfig with_variant(const CampaignConfig& base, const Variant& v);

}  // namespace platoon
