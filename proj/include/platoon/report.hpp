#pragma once

// Delimited-text writers for results tables, plot-ready figure data, region
// boundaries and trajectory dumps.

#include <ostream>
#include <span>
#include <string>

#include "platoon/dynamics.hpp"
#include "platoon/gains.hpp"
#include "platoon/montecarlo.hpp"

namespace platoon {

// Six significant digits, printf %g style.
std::string format_sig(double v);

inline constexpr const char* kResultsHeader =
    "r,d_m,D0_mps2,P,N_expected,S_sum_mps,S_per_collision_mps,n,seed";

void write_results_header(std::ostream& os);
void write_results_rows(std::ostream& os, const Variant& v,
                        std::span<const SafetyMetrics> rows);
std::string results_table(const ComparisonTable& table);

// Pairwise b - a differences for every variant pair a < b.
std::string deltas_table(const ComparisonTable& table);

enum class Metric { P, n_expected, s_sum, s_per_collision };
const char* metric_name(Metric m);
double metric_value(const SafetyMetrics& s, Metric m);

// One figure analog: rows = D0, one column per r at standstill spacing d.
std::string figure_table(const ComparisonTable& table, double d, Metric m);

// Two columns "kv kp", one point per line.
std::string region_table(const RegionBoundary& b);

class CsvTrajectoryWriter : public TrajectoryObserver {
 public:
  explicit CsvTrajectoryWriter(std::ostream& os);
  void record(const StepRecord& rec) override;

 private:
  std::ostream& os_;
};

}  // namespace platoon
