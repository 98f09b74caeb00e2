#pragma once

// One emergency-braking trajectory of a leader plus N followers.
//
// Each vehicle obeys x' = v, v' = a, tau a' + a = u. Per step of size h the
// position and velocity advance by forward Euler and the acceleration by
// classical RK4 on the lag ODE with the input held over the step. After each
// step, follower i has collided with i-1 when x_i >= x_{i-1}; the pair then
// stops in place for the rest of the run (no restitution).

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "platoon/gains.hpp"

namespace platoon {

enum class Mode {
  coordinated,    // followers run the r-predecessor CTH law
  uncoordinated,  // every vehicle brakes open-loop at its own capability
};

const char* to_string(Mode m);
Mode parse_mode(const std::string& s);

struct ScenarioConfig {
  Mode mode = Mode::coordinated;
  std::size_t followers = 10;  // N
  double d = 6.0;              // standstill spacing, m
  double v0 = 25.0;            // initial steady-state speed, m/s
  double tau = 0.5;            // actuation lag, s
  GainSet gains;               // includes r and hw
  double leader_decel = 9.75;  // D0, m/s^2; 0 means the leader never brakes
  double horizon = 50.0;       // T, s
  double step = 0.01;          // h, s
  bool clamp_reverse = true;   // stopped vehicles do not roll backwards
  bool leader_through_lag = true;
  // Stop integrating once the platoon is provably at rest for good. Only
  // engaged with clamp_reverse; never changes the outcome.
  bool early_exit = true;

  long steps() const;  // K = T / h
  // Throws ConfigError on out-of-range parameters.
  void validate() const;

  bool operator==(const ScenarioConfig&) const = default;
};

// Clamp default that reproduces each mode's reference behaviour: coordinated
// runs clamp, the open-loop baseline follows the literal equations.
bool default_clamp_reverse(Mode m);

struct VehicleState {
  double x = 0.0;  // m
  double v = 0.0;  // m/s
  double a = 0.0;  // m/s^2
  double D = 0.0;  // capability, m/s^2
  bool frozen = false;
  bool collided = false;  // CS_l: this vehicle hit its predecessor
  std::optional<double> rv_at_impact;
};

struct PlatoonState {
  std::vector<VehicleState> vehicles;  // [0] is the leader
  long step = 0;
  double h = 0.01;

  std::size_t followers() const { return vehicles.size() - 1; }
};

struct Collision {
  std::size_t follower;
  double relative_velocity;  // v_i - v_{i-1} at the detection step
};

struct IterationOutcome {
  std::vector<unsigned char> collided;  // CS_1..CS_N
  std::vector<double> rv;               // RV_1..RV_N, 0 when no collision
  long steps_run = 0;

  int collisions() const;
  double rv_sum() const;
  bool any() const { return collisions() > 0; }
  // RV / CS, or 0 without collisions.
  double severity() const;
};

struct StepRecord {
  long step;
  std::size_t vehicle;
  double x, v, a;
  double u;        // commanded
  double u_sat;    // applied
  bool frozen;
};

class TrajectoryObserver {
 public:
  virtual ~TrajectoryObserver() = default;
  virtual void record(const StepRecord& rec) = 0;
};

// Leader at x = 0, follower i at -i (d + hw v0), all at v0 with a = 0.
PlatoonState initial_platoon(const ScenarioConfig& cfg,
                             std::span<const double> follower_decel);

// Unsaturated control input of follower i >= 1, using min(r, i)
// predecessors.
double control_input(std::size_t i, const PlatoonState& p,
                     const ScenarioConfig& cfg);

inline double saturate(double u, double D) {
  return u < -D ? -D : (u > D ? D : u);
}

// Open-loop braking command -D while moving forward, 0 once stopped.
inline double braking_input(const VehicleState& s) {
  return s.v > 0.0 ? -s.D : 0.0;
}

double leader_input(const PlatoonState& p, const ScenarioConfig& cfg);

// Saturated inputs for every vehicle (0 for frozen ones). When `commanded`
// is nonempty it receives the pre-saturation values.
void applied_inputs(const PlatoonState& p, const ScenarioConfig& cfg,
                    std::span<double> out,
                    std::span<double> commanded = {});

// Advances every non-frozen vehicle by one step with the given (already
// saturated) inputs.
void rk4_step(PlatoonState& p, std::span<const double> inputs,
              const ScenarioConfig& cfg);

// One RK4 step of tau a' + a = u with u held constant.
double lag_rk4(double a, double u, double tau, double h);

// Flags and freezes every newly overlapping pair, scanning front to rear.
// Relative velocities use the velocities before any freeze in this step.
std::vector<Collision> detect_and_freeze(PlatoonState& p);

// Runs the full horizon. Throws DivergenceError if any |x|, |v|, |a|
// exceeds 1e9.
IterationOutcome simulate_run(const ScenarioConfig& cfg,
                              std::span<const double> follower_decel,
                              TrajectoryObserver* observer = nullptr);

}  // namespace platoon
