// platoon-safety: command-line front end for the platoon safety simulator.
//
//   platoon-safety gains     [--config F] [--allow-infeasible-gains] ...
//   platoon-safety campaign  [--config F] [--seed S] [--iterations N]
//                            [--sweep KEY=V1,V2,...]... [--mode M]
//                            [--threads T] [--output DIR] ...
//   platoon-safety validate  [--config F] ...
//   platoon-safety avoidance [--config F]
//
// Exit codes: 0 success, 2 config error, 3 infeasible gains, 4 divergence,
// 5 validation failure.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "platoon/config.hpp"
#include "platoon/error.hpp"
#include "platoon/gains.hpp"
#include "platoon/montecarlo.hpp"
#include "platoon/oracle.hpp"
#include "platoon/report.hpp"
#include "platoon/stochastic.hpp"

#ifndef PLATOON_VERSION
#define PLATOON_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using namespace platoon;

namespace {

enum Exit : int {
  kOk = 0,
  kConfig = 2,
  kInfeasible = 3,
  kDiverged = 4,
  kValidation = 5,
};

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<long> iterations;
  std::vector<std::string> sweeps;
  std::optional<std::string> mode;
  bool allow_infeasible = false;
  bool dump_trajectories = false;
  std::optional<std::string> output;
  std::optional<int> threads;
};

RunConfig resolve(const Flags& f) {
  RunConfig cfg = f.config.empty() ? parse_config("", "<defaults>")
                                   : load_config(f.config);
  if (f.seed) cfg.campaign.seed = *f.seed;
  if (f.iterations) cfg.campaign.iterations = *f.iterations;
  if (f.mode) cfg.set_mode(parse_mode(*f.mode));
  for (const auto& s : f.sweeps) apply_sweep(cfg, s);
  if (f.allow_infeasible) cfg.allow_infeasible_gains = true;
  if (f.dump_trajectories) cfg.dump_trajectories = true;
  if (f.output) cfg.output_dir = *f.output;
  if (f.threads) cfg.campaign.threads = *f.threads;
  cfg.validate();
  return cfg;
}

std::string utc_timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

class OutputDir {
 public:
  explicit OutputDir(const std::string& dir) : root_(dir) {
    fs::create_directories(root_);
  }

  void write(const std::string& rel, const std::string& content) {
    const fs::path p = root_ / rel;
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + p.string());
    out << content;
    files_.push_back(rel);
  }

  std::ofstream open(const std::string& rel) {
    const fs::path p = root_ / rel;
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + p.string());
    files_.push_back(rel);
    return out;
  }

  // Writes the resolved config and a manifest naming every file written.
  void finish(const std::string& command, const RunConfig& cfg) {
    write("resolved_config.json", to_json(cfg) + "\n");
    nlohmann::ordered_json m;
    m["tool"] = "platoon-safety";
    m["version"] = PLATOON_VERSION;
    m["command"] = command;
    m["timestamp"] = utc_timestamp();
    m["seed"] = cfg.campaign.seed;
    m["config_file"] = "resolved_config.json";
    m["config"] = nlohmann::ordered_json::parse(to_json(cfg));
    m["outputs"] = files_;
    std::ofstream out(root_ / "manifest.json", std::ios::binary);
    out << m.dump(2) << '\n';
  }

  const fs::path& root() const { return root_; }

 private:
  fs::path root_;
  std::vector<std::string> files_;
};

std::string tag(double v) {
  std::string s = format_sig(v);
  for (char& c : s)
    if (c == '.') c = 'p';
  return s;
}

struct GainVerdict {
  bool feasible = false;
  std::string message;
};

GainVerdict check_gains(const GainSet& g, double tau0) {
  std::ostringstream os;
  try {
    const RegionReport rep = region_check(g, tau0);
    os << "r=" << g.r << " (kv=" << g.kv << ", kp=" << g.kp
       << "): margin1=" << format_sig(rep.margin1)
       << " margin2=" << format_sig(rep.margin2)
       << (rep.feasible ? " feasible" : " INFEASIBLE");
    return {rep.feasible, os.str()};
  } catch (const InfeasibleGainError& e) {
    os << "r=" << g.r << ": " << e.what();
    return {false, os.str()};
  }
}

int cmd_gains(const RunConfig& cfg) {
  const ScenarioConfig& sc = cfg.campaign.scenario;
  OutputDir out(cfg.output_dir);
  std::printf("%-3s %-12s %-10s %-10s %-12s %-12s %s\n", "r", "hw_min",
              "feasible", "margin1", "margin2", "hinf_peak", "region");
  for (int r : cfg.region_r) {
    GainSet g = sc.gains;
    g.r = r;
    const std::string file = "region_r" + std::to_string(r) + ".dat";
    try {
      const double hw_min = headway_lower_bound(cfg.tau0, g.ka, r);
      const RegionReport rep = region_check(g, cfg.tau0);
      const HinfResult hinf =
          hinf_check(TransferFunction::propagation(g, cfg.tau0), r);
      const RegionBoundary b =
          region_boundary(g.ka, r, g.hw, cfg.tau0, cfg.region_samples);
      std::string body = "# kv kp boundary of the admissible region, r=" +
                         std::to_string(r) + "\n";
      if (b.empty()) body += "# empty: " + b.diagnostic + "\n";
      body += region_table(b);
      out.write(file, body);
      std::printf("%-3d %-12.6g %-10s %-12.6g %-12.6g %-12.6g %s\n", r, hw_min,
                  rep.feasible ? "yes" : "no", rep.margin1, rep.margin2,
                  hinf.max_gain, b.empty() ? "empty" : file.c_str());
      if (b.empty()) std::fprintf(stderr, "warning: %s\n", b.diagnostic.c_str());
    } catch (const InfeasibleGainError& e) {
      out.write(file, std::string("# empty: ") + e.what() + "\n");
      std::printf("%-3d %s\n", r, e.what());
    }
  }

  std::set<int> requested{sc.gains.r};
  requested.insert(cfg.sweep_r.begin(), cfg.sweep_r.end());
  bool all_ok = true;
  for (int r : requested) {
    GainSet g = sc.gains;
    g.r = r;
    const GainVerdict v = check_gains(g, cfg.tau0);
    std::printf("requested gains %s\n", v.message.c_str());
    all_ok = all_ok && v.feasible;
  }
  out.finish("gains", cfg);
  if (!all_ok) {
    if (cfg.allow_infeasible_gains) {
      std::fprintf(stderr,
                   "warning: requested gains are outside the admissible "
                   "region (allowed by --allow-infeasible-gains)\n");
      return kOk;
    }
    std::fprintf(stderr,
                 "error: requested gains are outside the admissible region; "
                 "pass --allow-infeasible-gains to proceed anyway\n");
    return kInfeasible;
  }
  return kOk;
}

int cmd_campaign(const RunConfig& cfg) {
  const std::vector<Variant> variants = cfg.variants();
  if (cfg.campaign.scenario.mode == Mode::coordinated) {
    std::set<int> rs;
    for (const Variant& v : variants) rs.insert(v.r);
    for (int r : rs) {
      GainSet g = cfg.campaign.scenario.gains;
      g.r = r;
      const GainVerdict verdict = check_gains(g, cfg.tau0);
      if (verdict.feasible) continue;
      if (!cfg.allow_infeasible_gains) {
        std::fprintf(stderr,
                     "error: gains not string stable: %s\n"
                     "pass --allow-infeasible-gains to run anyway\n",
                     verdict.message.c_str());
        return kInfeasible;
      }
      std::fprintf(stderr, "warning: gains not string stable: %s\n",
                   verdict.message.c_str());
    }
  }

  std::vector<CampaignConfig> cfgs;
  for (const Variant& v : variants) cfgs.push_back(with_variant(cfg.campaign, v));
  const ComparisonTable table = compare_topologies(cfgs);

  OutputDir out(cfg.output_dir);
  out.write("results.csv", results_table(table));
  if (table.variants.size() > 1) out.write("deltas.csv", deltas_table(table));
  std::set<double> ds;
  for (const Variant& v : variants) ds.insert(v.d);
  for (double d : ds) {
    for (Metric m : {Metric::P, Metric::n_expected, Metric::s_sum,
                     Metric::s_per_collision}) {
      out.write("figures/" + std::string(metric_name(m)) + "_d" + tag(d) +
                    ".csv",
                figure_table(table, d, m));
    }
  }

  if (cfg.dump_trajectories) {
    const auto sweep = cfg.campaign.resolved_sweep();
    for (const CampaignConfig& c : cfgs) {
      for (std::size_t k = 0; k < sweep.size(); ++k) {
        const DecelMatrix first =
            generate_matrix(c.dist, 1, c.scenario.followers, c.seed,
                            static_cast<std::uint32_t>(k), 1);
        ScenarioConfig sc = c.scenario;
        sc.leader_decel = sweep[k];
        std::ofstream os = out.open(
            "trajectories/traj_r" + std::to_string(sc.gains.r) + "_d" +
            tag(sc.d) + "_D0_" + tag(sweep[k]) + ".csv");
        CsvTrajectoryWriter writer(os);
        simulate_run(sc, first.row(0), &writer);
      }
    }
  }
  out.finish("campaign", cfg);

  std::cout << results_table(table);
  std::fprintf(stderr, "wrote %s\n", (out.root() / "results.csv").c_str());
  return kOk;
}

int cmd_validate(const RunConfig& cfg) {
  const ScenarioConfig& sc = cfg.campaign.scenario;
  enumeration_size(cfg.campaign.dist.size(), sc.followers);
  const OracleReport rep = mc_vs_oracle(
      sc, cfg.campaign.dist, cfg.validate_leader_decel,
      cfg.validate_iterations, cfg.campaign.seed, cfg.validate_delta,
      cfg.campaign.threads);
  OutputDir out(cfg.output_dir);
  out.write("oracle_report.txt", rep.to_text());
  out.finish("validate", cfg);
  std::cout << rep.to_text();
  return rep.pass ? kOk : kValidation;
}

int cmd_avoidance(const RunConfig& cfg) {
  const DecelDistribution& dist = cfg.campaign.dist;
  const std::size_t chain = cfg.campaign.scenario.followers;
  const AvoidanceProbability p = no_coord_avoidance_prob(dist, chain);
  std::printf("uncoordinated avoidance, %zu followers, m=%zu support values\n",
              chain, dist.size());
  std::printf("  P{D0 < D1 < ... < D%zu}          = %.17g\n", chain, p.exact);
  std::printf("  single increasing assignment    = %.17g\n",
              p.single_assignment);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo collision-safety evaluation of CACC platoons"};
  app.set_version_flag("--version", PLATOON_VERSION);
  app.require_subcommand(1);

  Flags f;
  auto add_common = [&f](CLI::App* sub) {
    sub->add_option("--config", f.config, "YAML config file");
    sub->add_option("--threads", f.threads, "worker threads (0 = default)");
    sub->add_option("--output", f.output, "output directory");
    sub->add_option("--seed", f.seed, "master seed (u64)");
    sub->add_option("--iterations", f.iterations, "Monte Carlo iterations n");
    sub->add_option("--sweep", f.sweeps, "KEY=V1,V2,... with KEY in r, d, D0")
        ->take_all()
        ->allow_extra_args(false);
    sub->add_option("--mode", f.mode, "coordinated | uncoordinated")
        ->check(CLI::IsMember({"coordinated", "uncoordinated"}));
    sub->add_flag("--allow-infeasible-gains", f.allow_infeasible,
                  "run even if gains violate string stability");
    sub->add_flag("--dump-trajectories", f.dump_trajectories,
                  "write the first iteration of every sweep point per step");
  };
  CLI::App* gains = app.add_subcommand("gains", "string-stability analysis");
  CLI::App* campaign = app.add_subcommand("campaign", "run Monte Carlo sweeps");
  CLI::App* validate =
      app.add_subcommand("validate", "compare Monte Carlo with exact enumeration");
  CLI::App* avoidance = app.add_subcommand(
      "avoidance", "uncoordinated collision-avoidance probability");
  for (CLI::App* sub : {gains, campaign, validate, avoidance}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    const RunConfig cfg = resolve(f);
    if (*gains) return cmd_gains(cfg);
    if (*campaign) return cmd_campaign(cfg);
    if (*validate) return cmd_validate(cfg);
    if (*avoidance) return cmd_avoidance(cfg);
  } catch (const BudgetError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kConfig;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfig;
  } catch (const InfeasibleGainError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInfeasible;
  } catch (const CampaignError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kDiverged;
  } catch (const DivergenceError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kDiverged;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return kOk;
}
