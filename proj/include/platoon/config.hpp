#pragma once

// Run configuration: a YAML document with sections platoon, gains, topology,
// scenario, decel, mc, sweep, analysis, validate and output. Every key is
// optional; defaults reproduce the reference emergency-braking study
// (N = 10, tau = tau0 = 0.5 s, v0 = 25 m/s, T = 50 s, h = 0.01 s, n = 2000,
// ka = 0.2, kv = 0.92, kp = 0.03, hw = 0.86, support 4.75:0.5:9.75).

#include <string>
#include <vector>

#include "platoon/montecarlo.hpp"

namespace platoon {

struct RunConfig {
  RunConfig();  // reference defaults, stand-in capability pmf

  CampaignConfig campaign;
  double tau0 = 0.5;
  bool clamp_explicit = false;  // scenario.clamp_reverse was given

  std::vector<int> sweep_r;     // empty: just topology.r
  std::vector<double> sweep_d;  // empty: just platoon.standstill_spacing

  std::vector<int> region_r{1, 2, 3, 4};
  int region_samples = 200;
  bool allow_infeasible_gains = false;

  double validate_leader_decel = 9.75;
  long validate_iterations = 50000;
  double validate_delta = 0.01;

  std::string output_dir = "results";
  bool dump_trajectories = false;

  // Cross product of the r and d sweeps, r-major.
  std::vector<Variant> variants() const;
  void set_mode(Mode m);
  void validate() const;
};

// Throws ConfigError with "source:line:col: key: message" diagnostics.
RunConfig parse_config(const std::string& text,
                       const std::string& source = "<config>");
RunConfig load_config(const std::string& path);

// Applies a "--sweep KEY=V1,V2,..." override. Keys: r, d, D0.
void apply_sweep(RunConfig& cfg, const std::string& spec);

// Fully resolved snapshot as JSON text; parse_config accepts it back and
// yields an identical RunConfig.
std::string to_json(const RunConfig& cfg);

}  // namespace platoon
