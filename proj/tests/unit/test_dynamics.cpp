#include <cmath>
#include <cstring>
#include <random>

#include "doctest.h"
#include "platoon/dynamics.hpp"
#include "platoon/error.hpp"
#include "platoon/stochastic.hpp"

using namespace platoon;

namespace {

ScenarioConfig coordinated(int r = 1) {
  ScenarioConfig c;
  c.gains.r = r;
  return c;
}

ScenarioConfig uncoordinated(bool clamp) {
  ScenarioConfig c;
  c.mode = Mode::uncoordinated;
  c.clamp_reverse = clamp;
  return c;
}

std::vector<double> constant_draws(std::size_t n, double D) {
  return std::vector<double>(n, D);
}

class Recorder : public TrajectoryObserver {
 public:
  explicit Recorder(std::size_t vehicles) : rows(vehicles) {}
  void record(const StepRecord& r) override { rows[r.vehicle].push_back(r); }
  std::vector<std::vector<StepRecord>> rows;
};

std::vector<double> random_draws(std::mt19937_64& rng, std::size_t n) {
  static const auto support = DecelDistribution::default_support();
  std::uniform_int_distribution<std::size_t> pick(0, support.size() - 1);
  std::vector<double> d(n);
  for (double& x : d) x = support[pick(rng)];
  return d;
}

}  // namespace

TEST_CASE("initial platoon sits at the constant-headway equilibrium") {
  const ScenarioConfig cfg = coordinated();
  const PlatoonState p = initial_platoon(cfg, constant_draws(10, 9.75));
  REQUIRE(p.vehicles.size() == 11);
  CHECK(p.followers() == 10);
  CHECK(p.vehicles[0].x == 0.0);
  CHECK(p.vehicles[0].D == 9.75);
  CHECK(p.vehicles[1].x == doctest::Approx(-27.5).epsilon(1e-15));
  CHECK(p.vehicles[10].x == doctest::Approx(-275.0).epsilon(1e-15));
  for (std::size_t i = 0; i <= 10; ++i) {
    CHECK(p.vehicles[i].v == 25.0);
    CHECK(p.vehicles[i].a == 0.0);
    CHECK_FALSE(p.vehicles[i].frozen);
  }
  for (std::size_t i = 1; i <= 10; ++i) {
    const double delta = p.vehicles[i].x - p.vehicles[i - 1].x + cfg.d +
                         cfg.gains.hw * p.vehicles[i].v;
    CHECK(std::abs(delta) < 1e-12);
  }

  ScenarioConfig still = cfg;
  still.v0 = 0.0;
  const PlatoonState q = initial_platoon(still, constant_draws(10, 9.75));
  for (std::size_t i = 1; i <= 10; ++i)
    CHECK(q.vehicles[i].x == -static_cast<double>(i) * still.d);

  CHECK_THROWS_AS(initial_platoon(cfg, constant_draws(9, 9.75)), ConfigError);
}

TEST_CASE("control input vanishes at equilibrium") {
  for (int r = 1; r <= 4; ++r) {
    const ScenarioConfig cfg = coordinated(r);
    const PlatoonState p = initial_platoon(cfg, constant_draws(10, 9.75));
    for (std::size_t i = 1; i <= 10; ++i)
      CHECK(std::abs(control_input(i, p, cfg)) < 1e-12);
  }
}

TEST_CASE("control input responds to a velocity deficit") {
  const ScenarioConfig cfg = coordinated(1);
  PlatoonState p = initial_platoon(cfg, constant_draws(10, 9.75));
  p.vehicles[1].v = cfg.v0 - 1.0;
  CHECK(control_input(1, p, cfg) == doctest::Approx(0.9458).epsilon(1e-12));
}

TEST_CASE("truncated law uses min(r, i) predecessors") {
  const ScenarioConfig cfg = coordinated(3);
  PlatoonState p = initial_platoon(cfg, constant_draws(10, 9.75));
  p.vehicles[0].a = 1.0;
  p.vehicles[1].a = 2.0;
  p.vehicles[2].a = 4.0;
  CHECK(control_input(1, p, cfg) == doctest::Approx(0.2 * 1.0));
  CHECK(control_input(2, p, cfg) == doctest::Approx(0.2 * (2.0 + 1.0)));
  CHECK(control_input(3, p, cfg) == doctest::Approx(0.2 * (4.0 + 2.0 + 1.0)));
  CHECK(control_input(4, p, cfg) == doctest::Approx(0.2 * (4.0 + 2.0)));
}

TEST_CASE("saturation") {
  CHECK(saturate(-12.0, 9.75) == -9.75);
  CHECK(saturate(0.0, 4.75) == 0.0);
  CHECK(saturate(12.0, 9.75) == 9.75);
  CHECK(saturate(-3.0, 4.75) == -3.0);
}

TEST_CASE("open-loop braking input") {
  const ScenarioConfig cfg = coordinated();
  PlatoonState p = initial_platoon(cfg, constant_draws(10, 9.75));
  CHECK(leader_input(p, cfg) == -9.75);
  p.vehicles[0].v = 0.0;
  CHECK(leader_input(p, cfg) == 0.0);

  const ScenarioConfig unc = uncoordinated(false);
  PlatoonState q = initial_platoon(unc, constant_draws(10, 6.25));
  std::vector<double> u(11);
  applied_inputs(q, unc, u);
  CHECK(u[0] == -9.75);
  for (std::size_t i = 1; i <= 10; ++i) CHECK(u[i] == -6.25);
}

TEST_CASE("lag integrator tracks the closed-form response") {
  const double tau = 0.5, h = 0.01;
  double a = 0.0;
  for (int k = 1; k <= 100; ++k) {
    a = lag_rk4(a, 1.0, tau, h);
    CHECK(std::abs(a - (1.0 - std::exp(-k * h / tau))) < 1e-8);
    if (k == 50) CHECK(a == doctest::Approx(0.63212).epsilon(1e-5));
  }
  CHECK(lag_rk4(0.7, 0.7, tau, h) == 0.7);
}

TEST_CASE("step integrates position and velocity by forward Euler") {
  ScenarioConfig cfg = coordinated();
  cfg.followers = 1;
  PlatoonState p = initial_platoon(cfg, constant_draws(1, 9.75));
  p.vehicles[1].a = -2.0;
  const VehicleState before = p.vehicles[1];
  const std::vector<double> u{0.0, -3.0};
  rk4_step(p, u, cfg);
  CHECK(p.vehicles[1].x == before.x + before.v * cfg.step);
  CHECK(p.vehicles[1].v == before.v + before.a * cfg.step);
  CHECK(p.vehicles[1].a == lag_rk4(before.a, -3.0, cfg.tau, cfg.step));
  CHECK(p.step == 1);
}

TEST_CASE("frozen vehicle is untouched by a step") {
  ScenarioConfig cfg = coordinated();
  PlatoonState p = initial_platoon(cfg, constant_draws(10, 9.75));
  p.vehicles[3].frozen = true;
  p.vehicles[3].v = 0.0;
  p.vehicles[3].a = 0.0;
  const VehicleState before = p.vehicles[3];
  std::vector<double> u(11, -5.0);
  rk4_step(p, u, cfg);
  CHECK(std::memcmp(&p.vehicles[3].x, &before.x, sizeof(double)) == 0);
  CHECK(p.vehicles[3].v == before.v);
  CHECK(p.vehicles[3].a == before.a);
}

TEST_CASE("direct assignment bypasses the lag for open-loop vehicles") {
  ScenarioConfig cfg = uncoordinated(true);
  cfg.leader_through_lag = false;
  PlatoonState p = initial_platoon(cfg, constant_draws(10, 6.25));
  std::vector<double> u(11);
  applied_inputs(p, cfg, u);
  rk4_step(p, u, cfg);
  CHECK(p.vehicles[0].a == -9.75);
  CHECK(p.vehicles[5].a == -6.25);
}

TEST_CASE("clamp stops reversing") {
  ScenarioConfig cfg = uncoordinated(true);
  cfg.followers = 1;
  PlatoonState p = initial_platoon(cfg, constant_draws(1, 6.0));
  p.vehicles[1].v = 0.01;
  p.vehicles[1].a = -5.0;
  const std::vector<double> u{0.0, -6.0};
  rk4_step(p, u, cfg);
  CHECK(p.vehicles[1].v == 0.0);
  CHECK(p.vehicles[1].a == 0.0);
}

TEST_CASE("collision detection") {
  ScenarioConfig cfg = coordinated();
  cfg.followers = 3;
  PlatoonState p = initial_platoon(cfg, constant_draws(3, 9.75));

  SUBCASE("no overlap leaves the state alone") {
    const PlatoonState before = p;
    CHECK(detect_and_freeze(p).empty());
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(p.vehicles[i].x == before.vehicles[i].x);
      CHECK(p.vehicles[i].v == before.vehicles[i].v);
      CHECK_FALSE(p.vehicles[i].frozen);
    }
  }

  SUBCASE("simultaneous collisions use pre-freeze velocities") {
    p.vehicles[0] = {0.0, 3.0, -1.0, 9.75};
    p.vehicles[1] = {0.0, 8.0, -2.0, 9.75};
    p.vehicles[2] = {0.5, 12.0, -3.0, 9.75};
    p.vehicles[3] = {-30.0, 20.0, 0.0, 9.75};
    const auto hits = detect_and_freeze(p);
    REQUIRE(hits.size() == 2);
    CHECK(hits[0].follower == 1);
    CHECK(hits[0].relative_velocity == 5.0);
    CHECK(hits[1].follower == 2);
    CHECK(hits[1].relative_velocity == 4.0);
    for (std::size_t i = 0; i <= 2; ++i) {
      CHECK(p.vehicles[i].frozen);
      CHECK(p.vehicles[i].v == 0.0);
      CHECK(p.vehicles[i].a == 0.0);
    }
    CHECK(p.vehicles[2].x == 0.5);
    CHECK_FALSE(p.vehicles[3].frozen);
    CHECK(p.vehicles[1].collided);
    CHECK_FALSE(p.vehicles[0].collided);
    CHECK(*p.vehicles[2].rv_at_impact == 4.0);

    // Already-collided followers are not counted again.
    CHECK(detect_and_freeze(p).empty());
  }
}

TEST_CASE("weak follower behind a strong leader collides once") {
  for (bool clamp : {true, false}) {
    ScenarioConfig cfg = uncoordinated(clamp);
    cfg.followers = 1;
    cfg.leader_decel = 9.75;
    const IterationOutcome out = simulate_run(cfg, constant_draws(1, 4.75));
    CHECK(out.collisions() == 1);
    CHECK(out.collided[0] == 1);
    CHECK(out.rv[0] > 0.0);
  }
}

TEST_CASE("identical capabilities never collide in the open-loop baseline") {
  for (bool clamp : {true, false}) {
    for (double D : {4.75, 7.25, 9.75}) {
      ScenarioConfig cfg = uncoordinated(clamp);
      cfg.leader_decel = D;
      const IterationOutcome out = simulate_run(cfg, constant_draws(10, D));
      CHECK(out.collisions() == 0);
      CHECK(out.rv_sum() == 0.0);
      CHECK(out.severity() == 0.0);
    }
  }
}

TEST_CASE("equilibrium is invariant when the leader never brakes") {
  for (int r = 1; r <= 3; ++r) {
    ScenarioConfig cfg = coordinated(r);
    cfg.leader_decel = 0.0;
    Recorder rec(11);
    const IterationOutcome out =
        simulate_run(cfg, constant_draws(10, 9.75), &rec);
    CHECK(out.collisions() == 0);
    CHECK(out.steps_run == 5000);
    double worst_u = 0.0, worst_delta = 0.0;
    for (long k = 0; k < 5000; ++k) {
      for (std::size_t i = 1; i <= 10; ++i) {
        const StepRecord& me = rec.rows[i][k];
        const StepRecord& pred = rec.rows[i - 1][k];
        worst_u = std::max(worst_u, std::abs(me.u));
        worst_delta = std::max(
            worst_delta, std::abs(me.x - pred.x + cfg.d + cfg.gains.hw * me.v));
      }
    }
    CAPTURE(r);
    CHECK(worst_u < 1e-12);
    CHECK(worst_delta < 1e-10);
    CHECK(rec.rows[0][4999].x == doctest::Approx(25.0 * 49.99));
  }
}

TEST_CASE("coordination helps a platoon of strong followers") {
  ScenarioConfig coord = coordinated(1);
  coord.leader_decel = 7.25;
  ScenarioConfig open = uncoordinated(false);
  open.leader_decel = 7.25;
  const auto strong = constant_draws(10, 9.75);
  CHECK(simulate_run(coord, strong).collisions() <=
        simulate_run(open, strong).collisions());

  const std::vector<double> mixed{9.75, 4.75, 8.25, 5.25, 9.25,
                                  4.75, 7.75, 5.75, 9.75, 6.25};
  CHECK(simulate_run(coord, mixed).collisions() <
        simulate_run(open, mixed).collisions());
}

TEST_CASE("trajectory invariants over random draws") {
  std::mt19937_64 rng(5);
  const std::vector<ScenarioConfig> cases = [] {
    std::vector<ScenarioConfig> v;
    for (int r = 1; r <= 3; ++r) {
      for (double d : {2.0, 6.0}) {
        ScenarioConfig c = coordinated(r);
        c.d = d;
        c.early_exit = false;
        v.push_back(c);
      }
    }
    v.push_back(uncoordinated(true));
    v.push_back(uncoordinated(false));
    return v;
  }();
  for (const ScenarioConfig& base : cases) {
    for (int trial = 0; trial < 4; ++trial) {
      ScenarioConfig cfg = base;
      cfg.leader_decel = 4.75 + 0.5 * (trial * 3 % 11);
      const auto draws = random_draws(rng, 10);
      Recorder rec(11);
      const IterationOutcome out = simulate_run(cfg, draws, &rec);
      const long K = static_cast<long>(rec.rows[0].size());
      for (std::size_t j = 0; j <= 10; ++j) {
        const double D = j == 0 ? cfg.leader_decel : draws[j - 1];
        bool seen_frozen = false;
        double frozen_x = 0.0;
        for (long k = 0; k < K; ++k) {
          const StepRecord& s = rec.rows[j][k];
          CHECK(std::abs(s.u_sat) <= D);
          if (cfg.clamp_reverse) CHECK(s.v >= 0.0);
          if (seen_frozen) {
            CHECK(s.frozen);
            CHECK(s.x == frozen_x);
          } else if (s.frozen) {
            seen_frozen = true;
            frozen_x = s.x;
          }
        }
      }
      // The first overlapping step is preceded by a clear gap.
      for (std::size_t i = 1; i <= 10; ++i) {
        if (!out.collided[i - 1]) continue;
        long first = -1;
        for (long k = 0; k < K; ++k) {
          if (rec.rows[i][k].x >= rec.rows[i - 1][k].x) {
            first = k;
            break;
          }
        }
        if (first > 0) {
          CHECK(rec.rows[i][first - 1].x < rec.rows[i - 1][first - 1].x);
        }
        CHECK(first != 0);
      }
    }
  }
}

TEST_CASE("early exit never changes the outcome") {
  std::mt19937_64 rng(17);
  int exited = 0;
  for (int trial = 0; trial < 60; ++trial) {
    ScenarioConfig on = coordinated(1 + trial % 3);
    on.d = trial % 2 ? 2.0 : 6.0;
    on.leader_decel = 4.75 + 0.5 * (trial % 11);
    ScenarioConfig off = on;
    off.early_exit = false;
    const auto draws = random_draws(rng, 10);
    const IterationOutcome a = simulate_run(on, draws);
    const IterationOutcome b = simulate_run(off, draws);
    CHECK(a.collided == b.collided);
    CHECK(a.rv == b.rv);
    CHECK(b.steps_run == 5000);
    if (a.steps_run < 5000) ++exited;
  }
  CHECK(exited > 0);
}

TEST_CASE("halving the step barely changes the expected collision count") {
  // Reference scenarios at the default leader capability, on the first 100
  // rows of the campaign's draws for that sweep point.
  const auto st = DecelDistribution::standin(DecelDistribution::default_support());
  const DecelMatrix m = generate_matrix(st, 100, 10, 1, 10);
  std::vector<ScenarioConfig> cases{uncoordinated(false)};
  for (int r = 1; r <= 3; ++r) {
    for (double d : {2.0, 4.0, 6.0}) {
      ScenarioConfig c = coordinated(r);
      c.d = d;
      cases.push_back(c);
    }
  }
  for (const ScenarioConfig& coarse : cases) {
    ScenarioConfig fine = coarse;
    fine.step = coarse.step / 2;
    double n_coarse = 0.0, n_fine = 0.0;
    for (std::size_t i = 0; i < 100; ++i) {
      n_coarse += simulate_run(coarse, m.row(i)).collisions();
      n_fine += simulate_run(fine, m.row(i)).collisions();
    }
    CAPTURE(to_string(coarse.mode));
    CAPTURE(coarse.gains.r);
    CAPTURE(coarse.d);
    CAPTURE(n_coarse);
    CAPTURE(n_fine);
    REQUIRE(n_coarse > 0.0);
    CHECK(std::abs(n_fine - n_coarse) / n_coarse < 0.02);
  }
}

TEST_CASE("numerical blow-up is reported with its step") {
  ScenarioConfig cfg = uncoordinated(false);
  cfg.tau = 1e-3;
  try {
    simulate_run(cfg, constant_draws(10, 6.25));
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(e.step() > 0);
    CHECK(e.step() < 100);
    CHECK(std::string(e.what()).find("step") != std::string::npos);
  }
}

TEST_CASE("scenario validation") {
  CHECK_NOTHROW(coordinated().validate());
  CHECK(coordinated().steps() == 5000);
  ScenarioConfig c = coordinated();
  c.d = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = coordinated();
  c.step = 0.03;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = coordinated();
  c.tau = -1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK(parse_mode("uncoordinated") == Mode::uncoordinated);
  CHECK_THROWS_AS(parse_mode("platoon"), ConfigError);
  CHECK(default_clamp_reverse(Mode::coordinated));
  CHECK_FALSE(default_clamp_reverse(Mode::uncoordinated));
}
