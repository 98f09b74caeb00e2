// Single-threaded reference for run_campaign. Kept deliberately plain: one
// matrix per sweep point, iterations in order, running sums.

#include <sstream>

#include "accumulator.hpp"
#include "platoon/error.hpp"
#include "platoon/montecarlo.hpp"

namespace platoon {

std::vector<SafetyMetrics> run_campaign_serial(const CampaignConfig& cfg) {
  cfg.validate();
  const std::vector<double> sweep = cfg.resolved_sweep();
  const auto n = static_cast<std::size_t>(cfg.iterations);

  std::vector<SafetyMetrics> out;
  for (std::size_t k = 0; k < sweep.size(); ++k) {
    const DecelMatrix draws =
        generate_matrix(cfg.dist, n, cfg.scenario.followers, cfg.seed,
                        static_cast<std::uint32_t>(k), /*threads=*/1);
    ScenarioConfig sc = cfg.scenario;
    sc.leader_decel = sweep[k];
    detail::MetricsAccumulator acc;
    for (std::size_t i = 0; i < n; ++i) {
      try {
        acc.add(simulate_run(sc, draws.row(i)));
      } catch (const DivergenceError& e) {
        std::ostringstream os;
        os << "run diverged at D0=" << sweep[k] << ", iteration " << i << ": "
           << e.what();
        throw CampaignError(sweep[k], i, e.step(), os.str());
      }
    }
    out.push_back(acc.finish(sweep[k], cfg.seed));
  }
  return out;
}

}  // namespace platoon
