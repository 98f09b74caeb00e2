#include "platoon/montecarlo.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "accumulator.hpp"
#include "parallel.hpp"
#include "platoon/error.hpp"

namespace platoon {

long hoeffding_min_samples(double eps, double delta) {
  if (!(eps > 0.0)) throw ConfigError("hoeffding: eps must be > 0");
  if (!(delta > 0.0 && delta < 1.0))
    throw ConfigError("hoeffding: delta must lie in (0, 1)");
  const double n = std::ceil(std::log(2.0 / delta) / (2.0 * eps * eps));
  return n < 1.0 ? 1L : static_cast<long>(n);
}

double hoeffding_epsilon(long n, double delta) {
  if (n < 1) throw ConfigError("hoeffding: n must be >= 1");
  if (!(delta > 0.0 && delta < 1.0))
    throw ConfigError("hoeffding: delta must lie in (0, 1)");
  return std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(n)));
}

std::vector<double> CampaignConfig::resolved_sweep() const {
  if (!leader_sweep.empty()) return leader_sweep;
  auto v = dist.values();
  return {v.begin(), v.end()};
}

void CampaignConfig::validate() const {
  ScenarioConfig sc = scenario;
  sc.leader_decel = 0.0;
  sc.validate();
  if (iterations < 1) throw ConfigError("mc.iterations must be >= 1");
  if (threads < 0) throw ConfigError("mc.threads must be >= 0");
  constexpr double kTol = 1e-9;
  for (double D0 : resolved_sweep()) {
    if (!(D0 >= dist.lower() - kTol && D0 <= dist.upper() + kTol)) {
      std::ostringstream os;
      os << "leader deceleration " << D0 << " outside the support ["
         << dist.lower() << ", " << dist.upper() << "]";
      throw ConfigError(os.str());
    }
  }
}

SafetyMetrics aggregate(std::span<const IterationOutcome> outcomes,
                        double leader_decel, std::uint64_t seed) {
  detail::MetricsAccumulator acc;
  for (const auto& o : outcomes) acc.add(o);
  return acc.finish(leader_decel, seed);
}

namespace {

struct Failure {
  long step = 0;  // 0 = none
  std::string what;
};

}  // namespace

std::vector<SafetyMetrics> run_campaign(const CampaignConfig& cfg) {
  cfg.validate();
  const std::vector<double> sweep = cfg.resolved_sweep();
  const auto n = static_cast<std::size_t>(cfg.iterations);
  const std::size_t followers = cfg.scenario.followers;
  const int nthreads = detail::team_size(cfg.threads);

  std::vector<DecelMatrix> draws;
  std::vector<ScenarioConfig> scenarios;
  draws.reserve(sweep.size());
  for (std::size_t k = 0; k < sweep.size(); ++k) {
    draws.push_back(generate_matrix(cfg.dist, n, followers, cfg.seed,
                                    static_cast<std::uint32_t>(k), nthreads));
    scenarios.push_back(cfg.scenario);
    scenarios.back().leader_decel = sweep[k];
  }

  const std::size_t total = sweep.size() * n;
  std::vector<IterationOutcome> outcomes(total);
  std::vector<Failure> failures(total);

  const auto count = static_cast<long long>(total);
#pragma omp parallel for schedule(dynamic, 8) num_threads(nthreads) if (nthreads != 1)
  for (long long t = 0; t < count; ++t) {
    const auto slot = static_cast<std::size_t>(t);
    const std::size_t k = slot / n;
    const std::size_t i = slot % n;
    try {
      outcomes[slot] = simulate_run(scenarios[k], draws[k].row(i));
    } catch (const DivergenceError& e) {
      failures[slot] = {e.step(), e.what()};
    } catch (const std::exception& e) {
      failures[slot] = {-1, e.what()};
    }
  }

  for (std::size_t slot = 0; slot < total; ++slot) {
    if (failures[slot].step != 0) {
      const std::size_t k = slot / n;
      std::ostringstream os;
      os << "run diverged at D0=" << sweep[k] << ", iteration " << slot % n
         << ": " << failures[slot].what;
      throw CampaignError(sweep[k], slot % n, failures[slot].step, os.str());
    }
  }

  std::vector<SafetyMetrics> out;
  out.reserve(sweep.size());
  for (std::size_t k = 0; k < sweep.size(); ++k) {
    out.push_back(aggregate(
        std::span<const IterationOutcome>(outcomes).subspan(k * n, n),
        sweep[k], cfg.seed));
  }
  return out;
}

std::vector<IterationOutcome> run_sweep_point(const CampaignConfig& cfg,
                                              std::size_t sweep_index) {
  cfg.validate();
  const std::vector<double> sweep = cfg.resolved_sweep();
  if (sweep_index >= sweep.size())
    throw ConfigError("sweep index out of range");
  const auto n = static_cast<std::size_t>(cfg.iterations);
  const DecelMatrix draws =
      generate_matrix(cfg.dist, n, cfg.scenario.followers, cfg.seed,
                      static_cast<std::uint32_t>(sweep_index), cfg.threads);
  ScenarioConfig sc = cfg.scenario;
  sc.leader_decel = sweep[sweep_index];

  std::vector<IterationOutcome> outcomes(n);
  std::vector<Failure> failures(n);
  const int nthreads = detail::team_size(cfg.threads);
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 8) num_threads(nthreads) if (nthreads != 1)
  for (long long t = 0; t < count; ++t) {
    const auto i = static_cast<std::size_t>(t);
    try {
      outcomes[i] = simulate_run(sc, draws.row(i));
    } catch (const DivergenceError& e) {
      failures[i] = {e.step(), e.what()};
    } catch (const std::exception& e) {
      failures[i] = {-1, e.what()};
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (failures[i].step != 0) {
      std::ostringstream os;
      os << "run diverged at D0=" << sc.leader_decel << ", iteration " << i
         << ": " << failures[i].what;
      throw CampaignError(sc.leader_decel, i, failures[i].step, os.str());
    }
  }
  return outcomes;
}

CampaignConfig with_variant(const CampaignConfig& base, const Variant& v) {
  CampaignConfig c = base;
  c.scenario.gains.r = v.r;
  c.scenario.d = v.d;
  return c;
}

std::vector<MetricsDelta> ComparisonTable::delta(std::size_t a,
                                                 std::size_t b) const {
  const auto& ma = metrics.at(a);
  const auto& mb = metrics.at(b);
  std::vector<MetricsDelta> out;
  out.reserve(ma.size());
  for (std::size_t k = 0; k < ma.size(); ++k) {
    out.push_back({ma[k].leader_decel, mb[k].P - ma[k].P,
                   mb[k].n_expected - ma[k].n_expected,
                   mb[k].s_sum - ma[k].s_sum,
                   mb[k].s_per_collision - ma[k].s_per_collision});
  }
  return out;
}

ComparisonTable compare_topologies(std::span<const CampaignConfig> cfgs) {
  ComparisonTable table;
  if (cfgs.empty()) return table;
  const CampaignConfig& ref = cfgs.front();
  const auto core = [](const CampaignConfig& c) {
    ScenarioConfig s = c.scenario;
    s.gains.r = 1;
    s.d = 1.0;
    return s;
  };
  for (const CampaignConfig& c : cfgs) {
    if (c.seed != ref.seed || c.iterations != ref.iterations ||
        !(c.dist == ref.dist) || c.resolved_sweep() != ref.resolved_sweep() ||
        !(core(c) == core(ref))) {
      throw ConfigError(
          "compare_topologies: variants must share seed, iterations, "
          "distribution, sweep and scenario apart from r and d");
    }
  }
  for (const CampaignConfig& c : cfgs) {
    table.variants.push_back({c.scenario.gains.r, c.scenario.d});
    table.metrics.push_back(run_campaign(c));
  }
  return table;
}

}  // namespace platoon
