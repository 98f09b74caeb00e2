#include "platoon/oracle.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "parallel.hpp"
#include "platoon/error.hpp"

namespace platoon {

std::size_t enumeration_size(std::size_t support, std::size_t followers,
                             std::size_t budget) {
  std::size_t total = 1;
  for (std::size_t l = 0; l < followers; ++l) {
    if (total > budget / support) {
      std::ostringstream os;
      os << "exhaustive enumeration needs " << support << "^" << followers
         << " combinations, more than the budget of " << budget;
      throw BudgetError(os.str());
    }
    total *= support;
  }
  return total;
}

namespace {

struct Combination {
  double weight = 0.0;
  IterationOutcome outcome;
};

// Combination c assigns follower l the support index (c / m^l) % m.
Combination evaluate(const ScenarioConfig& sc, const DecelDistribution& dist,
                     std::size_t c, std::vector<double>& caps) {
  const std::size_t m = dist.size();
  const auto values = dist.values();
  const auto probs = dist.probs();
  double w = 1.0;
  for (std::size_t l = 0; l < caps.size(); ++l) {
    const std::size_t j = c % m;
    c /= m;
    caps[l] = values[j];
    w *= probs[j];
  }
  Combination out;
  out.weight = w;
  if (w > 0.0) out.outcome = simulate_run(sc, caps);
  return out;
}

ExactMetrics reduce(const std::vector<Combination>& combos) {
  ExactMetrics e;
  e.combinations = combos.size();
  for (const Combination& c : combos) {
    e.total_weight += c.weight;
    if (c.weight == 0.0) continue;
    ++e.simulated;
    const IterationOutcome& o = c.outcome;
    if (o.any()) e.P += c.weight;
    e.n_expected += c.weight * o.collisions();
    e.s_sum += c.weight * o.rv_sum();
    e.s_per_collision += c.weight * o.severity();
  }
  return e;
}

ScenarioConfig prepared(const ScenarioConfig& cfg, double leader_decel) {
  ScenarioConfig sc = cfg;
  sc.leader_decel = leader_decel;
  sc.validate();
  return sc;
}

}  // namespace

ExactMetrics enumerate_exact(const ScenarioConfig& cfg,
                             const DecelDistribution& dist,
                             double leader_decel, int threads) {
  const std::size_t total = enumeration_size(dist.size(), cfg.followers);
  const ScenarioConfig sc = prepared(cfg, leader_decel);
  std::vector<Combination> combos(total);
  std::vector<long> failed_at(total, 0);
  std::vector<std::string> failure(total);
  const int nthreads = detail::team_size(threads);
  const auto count = static_cast<long long>(total);
#pragma omp parallel num_threads(nthreads) if (nthreads != 1)
  {
    std::vector<double> caps(sc.followers);
#pragma omp for schedule(dynamic, 16)
    for (long long c = 0; c < count; ++c) {
      const auto slot = static_cast<std::size_t>(c);
      try {
        combos[slot] = evaluate(sc, dist, slot, caps);
      } catch (const DivergenceError& e) {
        failed_at[slot] = e.step();
        failure[slot] = e.what();
      } catch (const std::exception& e) {
        failed_at[slot] = -1;
        failure[slot] = e.what();
      }
    }
  }
  for (std::size_t c = 0; c < total; ++c) {
    if (failed_at[c] != 0) {
      std::ostringstream os;
      os << "exact enumeration failed at D0=" << leader_decel
         << ", combination " << c << ": " << failure[c];
      throw CampaignError(leader_decel, c, failed_at[c], os.str());
    }
  }
  return reduce(combos);
}

ExactMetrics enumerate_exact_serial(const ScenarioConfig& cfg,
                                    const DecelDistribution& dist,
                                    double leader_decel) {
  const std::size_t total = enumeration_size(dist.size(), cfg.followers);
  const ScenarioConfig sc = prepared(cfg, leader_decel);
  std::vector<Combination> combos(total);
  std::vector<double> caps(sc.followers);
  for (std::size_t c = 0; c < total; ++c) {
    try {
      combos[c] = evaluate(sc, dist, c, caps);
    } catch (const DivergenceError& e) {
      std::ostringstream os;
      os << "exact enumeration failed at D0=" << leader_decel
         << ", combination " << c << ": " << e.what();
      throw CampaignError(leader_decel, c, e.step(), os.str());
    }
  }
  return reduce(combos);
}

OracleReport mc_vs_oracle(const ScenarioConfig& cfg,
                          const DecelDistribution& dist, double leader_decel,
                          long n, std::uint64_t seed, double delta,
                          int threads) {
  OracleReport rep;
  rep.exact = enumerate_exact(cfg, dist, leader_decel, threads);

  CampaignConfig camp;
  camp.scenario = cfg;
  camp.dist = dist;
  camp.iterations = n;
  camp.seed = seed;
  camp.leader_sweep = {leader_decel};
  camp.threads = threads;
  rep.mc = run_campaign(camp).front();

  const double N = static_cast<double>(cfg.followers);
  rep.followers = cfg.followers;
  rep.delta = delta;
  rep.eps = hoeffding_epsilon(n, delta);
  rep.err_P = std::abs(rep.mc.P - rep.exact.P);
  rep.err_N = std::abs(rep.mc.n_expected - rep.exact.n_expected) / N;
  rep.err_S_sum = std::abs(rep.mc.s_sum - rep.exact.s_sum);
  rep.err_S_per_collision =
      std::abs(rep.mc.s_per_collision - rep.exact.s_per_collision);
  rep.pass = rep.err_P <= rep.eps && rep.err_N <= rep.eps;
  return rep;
}

std::string OracleReport::to_text() const {
  char buf[160];
  std::ostringstream os;
  std::snprintf(buf, sizeof buf,
                "oracle check: N=%zu D0=%g n=%ld seed=%llu delta=%g eps=%.6g\n",
                followers, mc.leader_decel, mc.n,
                static_cast<unsigned long long>(mc.seed), delta, eps);
  os << buf;
  std::snprintf(buf, sizeof buf, "  %-16s %12s %12s %12s\n", "metric", "exact",
                "monte-carlo", "abs-error");
  os << buf;
  const auto row = [&](const char* name, double ex, double mcv, double err) {
    std::snprintf(buf, sizeof buf, "  %-16s %12.6g %12.6g %12.6g\n", name, ex,
                  mcv, err);
    os << buf;
  };
  row("P", exact.P, mc.P, err_P);
  row("N/N", exact.n_expected / followers, mc.n_expected / followers, err_N);
  row("S_sum", exact.s_sum, mc.s_sum, err_S_sum);
  row("S_per_collision", exact.s_per_collision, mc.s_per_collision,
      err_S_per_collision);
  std::snprintf(buf, sizeof buf, "  combinations: %zu (%zu simulated)\n",
                exact.combinations, exact.simulated);
  os << buf;
  os << "  result: " << (pass ? "PASS" : "FAIL") << "\n";
  return os.str();
}

}  // namespace platoon
