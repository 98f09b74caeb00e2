#include "platoon/report.hpp"

#include <cstdio>
#include <set>
#include <sstream>

namespace platoon {

std::string format_sig(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void write_results_header(std::ostream& os) { os << kResultsHeader << '\n'; }

void write_results_rows(std::ostream& os, const Variant& v,
                        std::span<const SafetyMetrics> rows) {
  for (const SafetyMetrics& m : rows) {
    os << v.r << ',' << format_sig(v.d) << ',' << format_sig(m.leader_decel)
       << ',' << format_sig(m.P) << ',' << format_sig(m.n_expected) << ','
       << format_sig(m.s_sum) << ',' << format_sig(m.s_per_collision) << ','
       << m.n << ',' << m.seed << '\n';
  }
}

std::string results_table(const ComparisonTable& table) {
  std::ostringstream os;
  write_results_header(os);
  for (std::size_t k = 0; k < table.variants.size(); ++k)
    write_results_rows(os, table.variants[k], table.metrics[k]);
  return os.str();
}

std::string deltas_table(const ComparisonTable& table) {
  std::ostringstream os;
  os << "r_a,d_a_m,r_b,d_b_m,D0_mps2,dP,dN_expected,dS_sum_mps,"
        "dS_per_collision_mps\n";
  for (std::size_t a = 0; a < table.variants.size(); ++a) {
    for (std::size_t b = a + 1; b < table.variants.size(); ++b) {
      const Variant& va = table.variants[a];
      const Variant& vb = table.variants[b];
      for (const MetricsDelta& d : table.delta(a, b)) {
        os << va.r << ',' << format_sig(va.d) << ',' << vb.r << ','
           << format_sig(vb.d) << ',' << format_sig(d.leader_decel) << ','
           << format_sig(d.dP) << ',' << format_sig(d.dN) << ','
           << format_sig(d.dS_sum) << ',' << format_sig(d.dS_per_collision)
           << '\n';
      }
    }
  }
  return os.str();
}

const char* metric_name(Metric m) {
  switch (m) {
    case Metric::P: return "P";
    case Metric::n_expected: return "N_expected";
    case Metric::s_sum: return "S_sum_mps";
    case Metric::s_per_collision: return "S_per_collision_mps";
  }
  return "?";
}

double metric_value(const SafetyMetrics& s, Metric m) {
  switch (m) {
    case Metric::P: return s.P;
    case Metric::n_expected: return s.n_expected;
    case Metric::s_sum: return s.s_sum;
    case Metric::s_per_collision: return s.s_per_collision;
  }
  return 0.0;
}

std::string figure_table(const ComparisonTable& table, double d, Metric m) {
  std::vector<std::size_t> cols;
  for (std::size_t k = 0; k < table.variants.size(); ++k)
    if (table.variants[k].d == d) cols.push_back(k);
  std::ostringstream os;
  os << "D0_mps2";
  for (std::size_t k : cols)
    os << ',' << metric_name(m) << "_r" << table.variants[k].r;
  os << '\n';
  if (cols.empty()) return os.str();
  const std::size_t rows = table.metrics[cols.front()].size();
  for (std::size_t i = 0; i < rows; ++i) {
    os << format_sig(table.metrics[cols.front()][i].leader_decel);
    for (std::size_t k : cols)
      os << ',' << format_sig(metric_value(table.metrics[k][i], m));
    os << '\n';
  }
  return os.str();
}

std::string region_table(const RegionBoundary& b) {
  std::ostringstream os;
  os.precision(12);
  for (const auto& [kv, kp] : b.points) os << kv << ' ' << kp << '\n';
  return os.str();
}

CsvTrajectoryWriter::CsvTrajectoryWriter(std::ostream& os) : os_(os) {
  os_ << "step,vehicle,x_m,v_mps,a_mps2,u_mps2,u_sat_mps2,frozen\n";
}

void CsvTrajectoryWriter::record(const StepRecord& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%ld,%zu,%.9g,%.9g,%.9g,%.9g,%.9g,%d\n",
                r.step, r.vehicle, r.x, r.v, r.a, r.u, r.u_sat,
                r.frozen ? 1 : 0);
  os_ << buf;
}

}  // namespace platoon
