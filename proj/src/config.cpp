#include "platoon/config.hpp"

#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "json.hpp"
#include "platoon/error.hpp"

namespace platoon {

RunConfig::RunConfig() {
  campaign.dist =
      DecelDistribution::standin(DecelDistribution::default_support());
  campaign.scenario.clamp_reverse =
      default_clamp_reverse(campaign.scenario.mode);
}

std::vector<Variant> RunConfig::variants() const {
  const std::vector<int> rs =
      sweep_r.empty() ? std::vector<int>{campaign.scenario.gains.r} : sweep_r;
  const std::vector<double> ds =
      sweep_d.empty() ? std::vector<double>{campaign.scenario.d} : sweep_d;
  std::vector<Variant> out;
  for (int r : rs)
    for (double d : ds) out.push_back({r, d});
  return out;
}

void RunConfig::set_mode(Mode m) {
  campaign.scenario.mode = m;
  if (!clamp_explicit) campaign.scenario.clamp_reverse = default_clamp_reverse(m);
}

void RunConfig::validate() const {
  campaign.validate();
  const double tau = campaign.scenario.tau;
  if (!(tau0 > 0.0) || !(tau <= tau0))
    throw ConfigError("platoon.tau must lie in (0, platoon.tau0]");
  for (int r : sweep_r)
    if (r < 1) throw ConfigError("sweep.r values must be >= 1");
  for (double d : sweep_d)
    if (!(d > 0.0)) throw ConfigError("sweep.d values must be > 0");
  for (int r : region_r)
    if (r < 1) throw ConfigError("analysis.region_r values must be >= 1");
  if (region_samples < 2) throw ConfigError("analysis.samples must be >= 2");
  if (validate_iterations < 1)
    throw ConfigError("validate.iterations must be >= 1");
  if (!(validate_delta > 0.0 && validate_delta < 1.0))
    throw ConfigError("validate.delta must lie in (0, 1)");
  if (!(validate_leader_decel >= 0.0))
    throw ConfigError("validate.leader_decel must be >= 0");
  if (output_dir.empty()) throw ConfigError("output.dir must not be empty");
}

namespace {

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& at, const std::string& key,
                         const std::string& msg) const {
    std::ostringstream os;
    os << source_;
    const YAML::Mark m = at.Mark();
    if (!m.is_null()) os << ":" << m.line + 1 << ":" << m.column + 1;
    os << ": " << key << ": " << msg;
    throw ConfigError(os.str());
  }

  // Rejects keys outside `allowed`; returns false if the section is absent.
  bool section(const YAML::Node& node, const std::string& name,
               std::initializer_list<const char*> allowed) const {
    if (!node) return false;
    if (node.IsNull()) return false;
    if (!node.IsMap()) fail(node, name, "expected a mapping");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = node.begin(); it != node.end(); ++it) {
      const auto key = it->first.as<std::string>();
      if (!ok.count(key)) fail(it->first, name + "." + key, "unknown key");
    }
    return true;
  }

  template <class T>
  void read(const YAML::Node& parent, const char* key, const std::string& path,
            T& out, const char* type) const {
    const YAML::Node n = parent[key];
    if (!n) return;
    try {
      out = n.as<T>();
    } catch (const YAML::Exception&) {
      fail(n, path, std::string("expected ") + type);
    }
  }

  template <class T>
  void read_list(const YAML::Node& parent, const char* key,
                 const std::string& path, std::vector<T>& out,
                 const char* type) const {
    const YAML::Node n = parent[key];
    if (!n) return;
    out.clear();
    try {
      if (n.IsSequence()) {
        for (const auto& e : n) out.push_back(e.as<T>());
      } else {
        out.push_back(n.as<T>());
      }
    } catch (const YAML::Exception&) {
      fail(n, path, std::string("expected a list of ") + type);
    }
  }

 private:
  std::string source_;
};

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    std::ostringstream os;
    os << source << ":" << e.mark.line + 1 << ":" << e.mark.column + 1
       << ": parse error: " << e.msg;
    throw ConfigError(os.str());
  }

  RunConfig cfg;
  const Reader rd(source);
  if (!root || root.IsNull()) {
    cfg.validate();
    return cfg;
  }
  if (!root.IsMap()) rd.fail(root, "<root>", "expected a mapping of sections");
  rd.section(root, "<root>",
             {"platoon", "gains", "topology", "scenario", "decel", "mc",
              "sweep", "analysis", "validate", "output"});

  ScenarioConfig& sc = cfg.campaign.scenario;

  if (const YAML::Node n = root["platoon"];
      rd.section(n, "platoon", {"followers", "initial_speed",
                                "standstill_spacing", "tau", "tau0"})) {
    long followers = static_cast<long>(sc.followers);
    rd.read(n, "followers", "platoon.followers", followers, "an integer");
    if (followers < 1)
      rd.fail(n["followers"], "platoon.followers", "must be >= 1");
    sc.followers = static_cast<std::size_t>(followers);
    rd.read(n, "initial_speed", "platoon.initial_speed", sc.v0, "a number");
    rd.read(n, "standstill_spacing", "platoon.standstill_spacing", sc.d,
            "a number");
    rd.read(n, "tau", "platoon.tau", sc.tau, "a number");
    rd.read(n, "tau0", "platoon.tau0", cfg.tau0, "a number");
  }

  if (const YAML::Node n = root["gains"];
      rd.section(n, "gains", {"ka", "kv", "kp", "hw"})) {
    rd.read(n, "ka", "gains.ka", sc.gains.ka, "a number");
    rd.read(n, "kv", "gains.kv", sc.gains.kv, "a number");
    rd.read(n, "kp", "gains.kp", sc.gains.kp, "a number");
    rd.read(n, "hw", "gains.hw", sc.gains.hw, "a number");
  }

  if (const YAML::Node n = root["topology"]; rd.section(n, "topology", {"r"})) {
    rd.read(n, "r", "topology.r", sc.gains.r, "an integer");
  }

  if (const YAML::Node n = root["scenario"];
      rd.section(n, "scenario", {"mode", "horizon", "step", "clamp_reverse",
                                 "leader_through_lag", "early_exit"})) {
    if (const YAML::Node m = n["mode"]) {
      try {
        sc.mode = parse_mode(m.as<std::string>());
      } catch (const std::exception& e) {
        rd.fail(m, "scenario.mode", e.what());
      }
    }
    rd.read(n, "horizon", "scenario.horizon", sc.horizon, "a number");
    rd.read(n, "step", "scenario.step", sc.step, "a number");
    if (n["clamp_reverse"]) {
      rd.read(n, "clamp_reverse", "scenario.clamp_reverse", sc.clamp_reverse,
              "a boolean");
      cfg.clamp_explicit = true;
    }
    rd.read(n, "leader_through_lag", "scenario.leader_through_lag",
            sc.leader_through_lag, "a boolean");
    rd.read(n, "early_exit", "scenario.early_exit", sc.early_exit,
            "a boolean");
  }
  if (!cfg.clamp_explicit) sc.clamp_reverse = default_clamp_reverse(sc.mode);

  if (const YAML::Node n = root["decel"];
      rd.section(n, "decel", {"preset", "values", "lower", "upper", "count",
                              "probs", "weights", "leader_sweep"})) {
    std::vector<double> values;
    rd.read_list(n, "values", "decel.values", values, "numbers");
    if (values.empty()) {
      double lower = 4.75, upper = 9.75;
      long count = 11;
      rd.read(n, "lower", "decel.lower", lower, "a number");
      rd.read(n, "upper", "decel.upper", upper, "a number");
      rd.read(n, "count", "decel.count", count, "an integer");
      if (count < 1) rd.fail(n["count"], "decel.count", "must be >= 1");
      values = DecelDistribution::arithmetic_support(
          lower, upper, static_cast<std::size_t>(count));
    } else if (n["lower"] || n["upper"] || n["count"]) {
      rd.fail(n, "decel", "give either values or lower/upper/count, not both");
    }
    std::vector<double> probs, weights;
    rd.read_list(n, "probs", "decel.probs", probs, "numbers");
    rd.read_list(n, "weights", "decel.weights", weights, "numbers");
    std::string preset = "standin";
    rd.read(n, "preset", "decel.preset", preset, "a string");
    if (n["probs"] && n["weights"])
      rd.fail(n, "decel", "give either probs or weights, not both");
    if (n["preset"] && (n["probs"] || n["weights"]))
      rd.fail(n["preset"], "decel.preset", "conflicts with explicit probs");
    try {
      if (n["probs"]) {
        cfg.campaign.dist =
            DecelDistribution::from_probs(std::move(values), std::move(probs));
      } else if (n["weights"]) {
        cfg.campaign.dist = DecelDistribution::from_weights(
            std::move(values), std::move(weights));
      } else if (preset == "standin") {
        cfg.campaign.dist = DecelDistribution::standin(std::move(values));
      } else if (preset == "uniform") {
        cfg.campaign.dist = DecelDistribution::uniform(std::move(values));
      } else {
        rd.fail(n["preset"], "decel.preset",
                "unknown preset '" + preset + "' (expected standin or uniform)");
      }
    } catch (const DistributionError& e) {
      rd.fail(n, "decel", e.what());
    }
    rd.read_list(n, "leader_sweep", "decel.leader_sweep",
                 cfg.campaign.leader_sweep, "numbers");
  }

  if (const YAML::Node n = root["mc"];
      rd.section(n, "mc", {"iterations", "seed", "threads"})) {
    rd.read(n, "iterations", "mc.iterations", cfg.campaign.iterations,
            "an integer");
    rd.read(n, "seed", "mc.seed", cfg.campaign.seed,
            "an unsigned 64-bit integer");
    rd.read(n, "threads", "mc.threads", cfg.campaign.threads, "an integer");
  }

  if (const YAML::Node n = root["sweep"]; rd.section(n, "sweep", {"r", "d"})) {
    rd.read_list(n, "r", "sweep.r", cfg.sweep_r, "integers");
    rd.read_list(n, "d", "sweep.d", cfg.sweep_d, "numbers");
  }

  if (const YAML::Node n = root["analysis"];
      rd.section(n, "analysis",
                 {"region_r", "samples", "allow_infeasible_gains"})) {
    rd.read_list(n, "region_r", "analysis.region_r", cfg.region_r, "integers");
    rd.read(n, "samples", "analysis.samples", cfg.region_samples, "an integer");
    rd.read(n, "allow_infeasible_gains", "analysis.allow_infeasible_gains",
            cfg.allow_infeasible_gains, "a boolean");
  }

  if (const YAML::Node n = root["validate"];
      rd.section(n, "validate", {"leader_decel", "iterations", "delta"})) {
    rd.read(n, "leader_decel", "validate.leader_decel",
            cfg.validate_leader_decel, "a number");
    rd.read(n, "iterations", "validate.iterations", cfg.validate_iterations,
            "an integer");
    rd.read(n, "delta", "validate.delta", cfg.validate_delta, "a number");
  }

  if (const YAML::Node n = root["output"];
      rd.section(n, "output", {"dir", "dump_trajectories"})) {
    rd.read(n, "dir", "output.dir", cfg.output_dir, "a string");
    rd.read(n, "dump_trajectories", "output.dump_trajectories",
            cfg.dump_trajectories, "a boolean");
  }

  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

namespace {

template <class T>
std::vector<T> parse_numbers(const std::string& list, const std::string& key) {
  std::vector<T> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::istringstream is(item);
    T v{};
    if (!(is >> v) || !(is >> std::ws).eof())
      throw ConfigError("--sweep " + key + ": bad value '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("--sweep " + key + ": no values");
  return out;
}

}  // namespace

void apply_sweep(RunConfig& cfg, const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos)
    throw ConfigError("--sweep expects KEY=V1,V2,... (got '" + spec + "')");
  const std::string key = spec.substr(0, eq);
  const std::string list = spec.substr(eq + 1);
  if (key == "r") {
    cfg.sweep_r = parse_numbers<int>(list, key);
  } else if (key == "d") {
    cfg.sweep_d = parse_numbers<double>(list, key);
  } else if (key == "D0") {
    cfg.campaign.leader_sweep = parse_numbers<double>(list, key);
  } else {
    throw ConfigError("--sweep: unknown key '" + key +
                      "' (expected r, d or D0)");
  }
}

std::string to_json(const RunConfig& cfg) {
  using nlohmann::ordered_json;
  const ScenarioConfig& sc = cfg.campaign.scenario;
  const auto values = cfg.campaign.dist.values();
  const auto weights = cfg.campaign.dist.weights();

  ordered_json j;
  j["platoon"] = {{"followers", sc.followers},
                  {"initial_speed", sc.v0},
                  {"standstill_spacing", sc.d},
                  {"tau", sc.tau},
                  {"tau0", cfg.tau0}};
  j["gains"] = {{"ka", sc.gains.ka},
                {"kv", sc.gains.kv},
                {"kp", sc.gains.kp},
                {"hw", sc.gains.hw}};
  j["topology"] = {{"r", sc.gains.r}};
  j["scenario"] = {{"mode", to_string(sc.mode)},
                   {"horizon", sc.horizon},
                   {"step", sc.step},
                   {"clamp_reverse", sc.clamp_reverse},
                   {"leader_through_lag", sc.leader_through_lag},
                   {"early_exit", sc.early_exit}};
  ordered_json decel;
  decel["values"] = std::vector<double>(values.begin(), values.end());
  decel["weights"] = std::vector<double>(weights.begin(), weights.end());
  if (!cfg.campaign.leader_sweep.empty())
    decel["leader_sweep"] = cfg.campaign.leader_sweep;
  j["decel"] = decel;
  j["mc"] = {{"iterations", cfg.campaign.iterations},
             {"seed", cfg.campaign.seed},
             {"threads", cfg.campaign.threads}};
  ordered_json sweep = ordered_json::object();
  if (!cfg.sweep_r.empty()) sweep["r"] = cfg.sweep_r;
  if (!cfg.sweep_d.empty()) sweep["d"] = cfg.sweep_d;
  j["sweep"] = sweep;
  j["analysis"] = {{"region_r", cfg.region_r},
                   {"samples", cfg.region_samples},
                   {"allow_infeasible_gains", cfg.allow_infeasible_gains}};
  j["validate"] = {{"leader_decel", cfg.validate_leader_decel},
                   {"iterations", cfg.validate_iterations},
                   {"delta", cfg.validate_delta}};
  j["output"] = {{"dir", cfg.output_dir},
                 {"dump_trajectories", cfg.dump_trajectories}};
  return j.dump(2);
}

}  // namespace platoon
