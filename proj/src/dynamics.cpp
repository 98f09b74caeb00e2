#include "platoon/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "platoon/error.hpp"

namespace platoon {

const char* to_string(Mode m) {
  return m == Mode::coordinated ? "coordinated" : "uncoordinated";
}

Mode parse_mode(const std::string& s) {
  if (s == "coordinated") return Mode::coordinated;
  if (s == "uncoordinated") return Mode::uncoordinated;
  throw ConfigError("unknown mode '" + s +
                    "' (expected coordinated or uncoordinated)");
}

bool default_clamp_reverse(Mode m) { return m == Mode::coordinated; }

long ScenarioConfig::steps() const {
  return std::lround(horizon / step);
}

void ScenarioConfig::validate() const {
  std::ostringstream err;
  if (followers < 1) err << "platoon.followers must be >= 1; ";
  if (!(d > 0.0)) err << "platoon.standstill_spacing must be > 0; ";
  if (!(v0 >= 0.0)) err << "platoon.initial_speed must be >= 0; ";
  if (!(tau > 0.0)) err << "platoon.tau must be > 0; ";
  if (!(leader_decel >= 0.0)) err << "leader deceleration must be >= 0; ";
  if (!(step > 0.0)) err << "scenario.step must be > 0; ";
  if (!(horizon > 0.0)) err << "scenario.horizon must be > 0; ";
  if (step > 0.0 && horizon > 0.0) {
    const double k = horizon / step;
    if (std::abs(k - std::round(k)) > 1e-9 * k)
      err << "scenario.horizon / scenario.step must be an integer; ";
  }
  if (!err.str().empty()) throw ConfigError(err.str());
  platoon::validate(gains);
}

int IterationOutcome::collisions() const {
  int n = 0;
  for (auto c : collided) n += c ? 1 : 0;
  return n;
}

double IterationOutcome::rv_sum() const {
  double s = 0.0;
  for (double v : rv) s += v;
  return s;
}

double IterationOutcome::severity() const {
  const int n = collisions();
  return n > 0 ? rv_sum() / n : 0.0;
}

PlatoonState initial_platoon(const ScenarioConfig& cfg,
                             std::span<const double> follower_decel) {
  if (follower_decel.size() != cfg.followers) {
    std::ostringstream os;
    os << "expected " << cfg.followers << " follower capabilities, got "
       << follower_decel.size();
    throw ConfigError(os.str());
  }
  PlatoonState p;
  p.h = cfg.step;
  p.vehicles.resize(cfg.followers + 1);
  p.vehicles[0] = {0.0, cfg.v0, 0.0, cfg.leader_decel};
  const double gap = cfg.d + cfg.gains.hw * cfg.v0;
  for (std::size_t i = 1; i <= cfg.followers; ++i) {
    const double D = follower_decel[i - 1];
    if (!(D > 0.0)) throw ConfigError("follower capability must be > 0");
    p.vehicles[i] = {-static_cast<double>(i) * gap, cfg.v0, 0.0, D};
  }
  return p;
}

double control_input(std::size_t i, const PlatoonState& p,
                     const ScenarioConfig& cfg) {
  const GainSet& g = cfg.gains;
  const std::size_t depth = std::min<std::size_t>(g.r, i);
  const VehicleState& me = p.vehicles[i];
  double u = 0.0;
  for (std::size_t q = 1; q <= depth; ++q) {
    const VehicleState& pred = p.vehicles[i - q];
    const double qd = static_cast<double>(q);
    u += g.ka * pred.a - g.kv * (me.v - pred.v) -
         g.kp * (me.x - pred.x + cfg.d * qd + qd * g.hw * me.v);
  }
  return u;
}

double leader_input(const PlatoonState& p, const ScenarioConfig&) {
  return braking_input(p.vehicles[0]);
}

void applied_inputs(const PlatoonState& p, const ScenarioConfig& cfg,
                    std::span<double> out, std::span<double> commanded) {
  const bool keep = !commanded.empty();
  for (std::size_t j = 0; j < p.vehicles.size(); ++j) {
    const VehicleState& s = p.vehicles[j];
    double u = 0.0;
    if (!s.frozen) {
      if (j == 0)
        u = leader_input(p, cfg);
      else if (cfg.mode == Mode::uncoordinated)
        u = braking_input(s);
      else
        u = control_input(j, p, cfg);
    }
    if (keep) commanded[j] = u;
    out[j] = saturate(u, s.D);
  }
}

double lag_rk4(double a, double u, double tau, double h) {
  const double k1 = -a / tau + u / tau;
  const double k2 = -(a + h / 2.0 * k1) / tau + u / tau;
  const double k3 = -(a + h / 2.0 * k2) / tau + u / tau;
  const double k4 = -(a + h * k3) / tau + u / tau;
  return a + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

void rk4_step(PlatoonState& p, std::span<const double> inputs,
              const ScenarioConfig& cfg) {
  const double h = cfg.step;
  for (std::size_t j = 0; j < p.vehicles.size(); ++j) {
    VehicleState& s = p.vehicles[j];
    if (s.frozen) continue;
    const bool open_loop = j == 0 || cfg.mode == Mode::uncoordinated;
    const bool direct = open_loop && !cfg.leader_through_lag;
    double x = s.x + s.v * h;
    double v = s.v + s.a * h;
    double a = direct ? inputs[j] : lag_rk4(s.a, inputs[j], cfg.tau, h);
    if (cfg.clamp_reverse && v < 0.0) {
      v = 0.0;
      a = 0.0;
    }
    s.x = x;
    s.v = v;
    s.a = a;
  }
  ++p.step;
}

namespace {

void freeze(VehicleState& s) {
  s.frozen = true;
  s.v = 0.0;
  s.a = 0.0;
}

// True when no vehicle can ever move again. Requires clamp_reverse and
// h <= tau: with every v = 0, a <= 0 and every input <= 0, the RK4 update
// keeps a <= 0, the Euler update keeps v <= 0 (clamped to 0), and positions
// stay put, so the spacing part of each input is unchanged.
bool at_rest(const PlatoonState& p, const ScenarioConfig& cfg) {
  for (const VehicleState& s : p.vehicles) {
    if (s.v != 0.0 || s.a > 0.0) return false;
  }
  if (cfg.mode == Mode::uncoordinated) return true;
  const GainSet& g = cfg.gains;
  for (std::size_t i = 1; i < p.vehicles.size(); ++i) {
    const VehicleState& me = p.vehicles[i];
    if (me.frozen) continue;
    const std::size_t depth = std::min<std::size_t>(g.r, i);
    double u = 0.0;
    for (std::size_t q = 1; q <= depth; ++q) {
      u -= g.kp * (me.x - p.vehicles[i - q].x + cfg.d * static_cast<double>(q));
    }
    if (u > 0.0) return false;
  }
  return true;
}

}  // namespace

std::vector<Collision> detect_and_freeze(PlatoonState& p) {
  std::vector<Collision> hits;
  for (std::size_t i = 1; i < p.vehicles.size(); ++i) {
    const VehicleState& me = p.vehicles[i];
    const VehicleState& pred = p.vehicles[i - 1];
    if (!me.collided && me.x >= pred.x) hits.push_back({i, me.v - pred.v});
  }
  for (const Collision& c : hits) {
    VehicleState& me = p.vehicles[c.follower];
    me.collided = true;
    me.rv_at_impact = c.relative_velocity;
    freeze(me);
    freeze(p.vehicles[c.follower - 1]);
  }
  return hits;
}

IterationOutcome simulate_run(const ScenarioConfig& cfg,
                              std::span<const double> follower_decel,
                              TrajectoryObserver* observer) {
  PlatoonState p = initial_platoon(cfg, follower_decel);
  const std::size_t n = p.vehicles.size();
  const long steps = cfg.steps();
  const bool may_rest =
      cfg.early_exit && cfg.clamp_reverse && cfg.step <= cfg.tau;
  constexpr double kBlowUp = 1e9;

  std::vector<double> u(n);
  std::vector<double> cmd(observer ? n : 0);
  long k = 0;
  for (; k < steps; ++k) {
    applied_inputs(p, cfg, u, cmd);
    if (observer) {
      for (std::size_t j = 0; j < n; ++j) {
        const VehicleState& s = p.vehicles[j];
        observer->record({k, j, s.x, s.v, s.a, cmd[j], u[j], s.frozen});
      }
    }
    rk4_step(p, u, cfg);
    detect_and_freeze(p);

    for (const VehicleState& s : p.vehicles) {
      if (!(std::abs(s.x) <= kBlowUp && std::abs(s.v) <= kBlowUp &&
            std::abs(s.a) <= kBlowUp)) {
        std::ostringstream os;
        os << "trajectory diverged at step " << k + 1;
        throw DivergenceError(k + 1, os.str());
      }
    }
    if (may_rest && at_rest(p, cfg)) {
      ++k;
      break;
    }
  }

  IterationOutcome out;
  out.steps_run = k;
  out.collided.resize(n - 1);
  out.rv.resize(n - 1);
  for (std::size_t i = 1; i < n; ++i) {
    out.collided[i - 1] = p.vehicles[i].collided ? 1 : 0;
    out.rv[i - 1] = p.vehicles[i].rv_at_impact.value_or(0.0);
  }
  return out;
}

}  // namespace platoon
