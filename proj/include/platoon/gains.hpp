#pragma once

// String-stability analysis of the multi-predecessor CTH control law.
//
// Follower i applies
//   u_i = sum_{q=1..r} ka a_{i-q} - kv (v_i - v_{i-q})
//                      - kp (x_i - x_{i-q} + q d + q hw v_i)
// and spacing errors propagate through
//   H(s) = (ka s^2 + kv s + kp) / (tau s^3 + s^2 + gamma s + r kp),
//   gamma = r kv + r kp (r+1)/2 hw.
// Robust string stability over tau in (0, tau0] is certified by
// |r H(jw)| <= 1, which reduces to a closed-form region in the scaled gains.

#include <array>
#include <complex>
#include <string>
#include <utility>
#include <vector>

namespace platoon {

struct GainSet {
  double ka = 0.2;   // acceleration feed-forward, dimensionless
  double kv = 0.92;  // relative velocity, 1/s
  double kp = 0.03;  // spacing, 1/s^2
  int r = 1;         // look-ahead predecessors
  double hw = 0.86;  // time headway, s

  bool operator==(const GainSet&) const = default;
};

// Throws ConfigError unless ka, kv, kp, hw > 0 and r >= 1.
void validate(const GainSet& g);

struct ScaledGains {
  double ka;  // r ka
  double kv;  // r kv
  double kp;  // r kp
  double hw;  // (r+1)/2 hw
};

struct PlantParams {
  double tau = 0.5;   // actuation lag, s
  double tau0 = 0.5;  // upper bound on the lag, s
};

ScaledGains scale_gains(const GainSet& g);
GainSet unscale_gains(const ScaledGains& s, int r);

// Infimum of hw for which the admissible (kv, kp) region is nonempty:
// 4 tau0 / ((1+r)(1 + r ka)). Throws InfeasibleGainError if r ka is not in
// (0, 1).
double headway_lower_bound(double tau0, double ka, int r);

// Line constants of the admissible region in scaled coordinates:
//   kv/a1 + kp/b1 <= 1   and   kv/a2 + kp/b2 >= 1.
struct RegionConstants {
  double a1, b1, a2, b2;
};
RegionConstants region_constants(double ka, int r, double hw, double tau0);

struct RegionReport {
  bool feasible = false;
  double margin1 = 0.0;  // 1 - (kv/a1 + kp/b1)
  double margin2 = 0.0;  // (kv/a2 + kp/b2) - 1
};

inline constexpr double kRegionSlack = 1e-12;

RegionReport region_check(const GainSet& g, double tau0);

struct RegionBoundary {
  // Closed boundary of the admissible region in unscaled (kv, kp).
  std::vector<std::pair<double, double>> points;
  // Region vertices in traversal order, unscaled.
  std::vector<std::pair<double, double>> vertices;
  std::string diagnostic;  // set when the region is empty

  bool empty() const { return points.empty(); }
};

RegionBoundary region_boundary(double ka, int r, double hw, double tau0,
                               int samples);

// True iff the unscaled point lies in the admissible region (with slack).
bool in_region(double ka, double kv, double kp, int r, double hw, double tau0);

class TransferFunction {
 public:
  // Spacing-error propagation for gains g and actuation lag tau.
  static TransferFunction propagation(const GainSet& g, double tau);

  // Numerator (ka, kv, kp) in descending powers.
  const std::array<double, 3>& numerator() const { return num_; }
  // Denominator (tau, 1, gamma, r kp) in descending powers.
  const std::array<double, 4>& denominator() const { return den_; }
  double gamma() const { return den_[2]; }

  std::complex<double> operator()(std::complex<double> s) const;

 private:
  std::array<double, 3> num_{};
  std::array<double, 4> den_{};
};

struct HinfResult {
  double max_gain = 0.0;
  double arg_omega = 0.0;

  bool passes() const { return max_gain <= 1.0 + 1e-6; }
};

struct HinfGrid {
  double omega_min = 1e-3;
  double omega_max = 1e4;
  int points = 100000;
};

// Peak of |r H(jw)| over w = 0 and a log-spaced grid.
HinfResult hinf_check(const TransferFunction& tf, int r,
                      const HinfGrid& grid = {});

}  // namespace platoon
