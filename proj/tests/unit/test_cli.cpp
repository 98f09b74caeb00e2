#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "platoon/stochastic.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
};

Run cli(const std::string& args) {
  const fs::path log = fs::temp_directory_path() / "platoon_cli_test.log";
  const std::string cmd =
      std::string(PLATOON_CLI) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream in(log);
  std::stringstream buf;
  buf << in.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, buf.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("platoon_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_yaml(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "cfg.yaml";
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST_CASE("version and usage") {
  CHECK(cli("--version").out.find("1.0.0") != std::string::npos);
  CHECK(cli("frobnicate").code == 2);
  CHECK(cli("campaign --iterations nope").code == 2);
  CHECK(cli("campaign --mode sideways").code == 2);
}

TEST_CASE("gains: feasibility exit codes") {
  const fs::path dir = scratch("gains");
  const Run ok = cli("gains --output " + dir.string());
  CHECK(ok.code == 0);
  CHECK(fs::exists(dir / "region_r1.dat"));
  CHECK(fs::exists(dir / "region_r4.dat"));
  CHECK(fs::exists(dir / "manifest.json"));

  const fs::path low = write_yaml(dir, "gains: {hw: 0.3}\n");
  CHECK(cli("gains --config " + low.string() + " --output " + dir.string()).code == 3);

  CHECK(cli("gains --sweep r=2 --output " + dir.string()).code == 3);
  const Run waived =
      cli("gains --sweep r=2 --allow-infeasible-gains --output " + dir.string());
  CHECK(waived.code == 0);
  CHECK(waived.out.find("warning") != std::string::npos);
}

TEST_CASE("config errors map to exit 2") {
  const fs::path dir = scratch("cfg");
  const fs::path bad = write_yaml(dir, "platoon:\n  folowers: 3\n");
  const Run r = cli("campaign --config " + bad.string() + " --output " + dir.string());
  CHECK(r.code == 2);
  CHECK(r.out.find("cfg.yaml:2:3") != std::string::npos);
  CHECK(cli("campaign --config /nonexistent.yaml").code == 2);
  CHECK(cli("campaign --sweep q=1").code == 2);
}

TEST_CASE("validate: enumeration budget and agreement") {
  const fs::path dir = scratch("validate");
  const fs::path ten = write_yaml(dir, "platoon: {followers: 10}\n");
  CHECK(cli("validate --config " + ten.string() + " --output " + dir.string()).code == 2);

  const fs::path three = write_yaml(
      dir, "platoon: {followers: 3, standstill_spacing: 2}\n"
           "validate: {iterations: 20000, leader_decel: 9.25}\n");
  const Run r = cli("validate --config " + three.string() + " --output " + dir.string());
  CHECK(r.code == 0);
  const std::string report = slurp(dir / "oracle_report.txt");
  CHECK(report.find("PASS") != std::string::npos);
  CHECK(report.find("combinations: 1331") != std::string::npos);
}

TEST_CASE("avoidance prints the closed form") {
  const Run r = cli("avoidance --output " + scratch("avoid").string());
  CHECK(r.code == 0);
  CHECK(r.out.find("single increasing assignment") != std::string::npos);
  CHECK(r.out.find("e-12") != std::string::npos);
}

TEST_CASE("campaign: manifest, determinism and replay") {
  const fs::path a = scratch("camp_a");
  const fs::path b = scratch("camp_b");
  const fs::path c = scratch("camp_c");
  const std::string args =
      "campaign --iterations 40 --seed 42 --sweep r=1,2 --sweep D0=5.75,9.75 "
      "--allow-infeasible-gains --dump-trajectories";
  REQUIRE(cli(args + " --threads 1 --output " + a.string()).code == 0);
  REQUIRE(cli(args + " --threads 4 --output " + b.string()).code == 0);

  const std::string results = slurp(a / "results.csv");
  CHECK(results == slurp(b / "results.csv"));
  CHECK(slurp(a / "deltas.csv") == slurp(b / "deltas.csv"));
  CHECK(results.rfind("r,d_m,D0_mps2,P,", 0) == 0);

  const auto manifest = nlohmann::json::parse(slurp(a / "manifest.json"));
  CHECK(manifest["command"] == "campaign");
  CHECK(manifest["seed"] == 42);
  CHECK(manifest["tool"] == "platoon-safety");
  for (const auto& out : manifest["outputs"]) {
    CAPTURE(out.get<std::string>());
    CHECK(fs::exists(a / out.get<std::string>()));
  }
  bool has_traj = false;
  for (const auto& e : fs::recursive_directory_iterator(a / "trajectories"))
    has_traj |= e.path().extension() == ".csv";
  CHECK(has_traj);

  // The resolved snapshot reproduces the run on its own.
  REQUIRE(cli("campaign --config " + (a / "resolved_config.json").string() +
              " --output " + c.string()).code == 0);
  CHECK(slurp(c / "results.csv") == results);
}

TEST_CASE("campaign: seeded golden output") {
  const fs::path dir = scratch("golden");
  const fs::path cfg = write_yaml(
      dir, "platoon: {followers: 1}\n"
           "decel: {values: [4.75, 9.75], probs: [0.5, 0.5], leader_sweep: [9.75]}\n"
           "scenario: {mode: uncoordinated}\n");
  REQUIRE(cli("campaign --config " + cfg.string() +
              " --iterations 4 --seed 1 --output " + dir.string()).code == 0);
  const std::string results = slurp(dir / "results.csv");
  CHECK(results ==
        "r,d_m,D0_mps2,P,N_expected,S_sum_mps,S_per_collision_mps,n,seed\n"
        "1,6,9.75,0.25,0.25,3.24581,3.24581,4,1\n");

  // Only the weak follower collides, so P is the share of 4.75 draws.
  const auto dist =
      platoon::DecelDistribution::from_probs({4.75, 9.75}, {0.5, 0.5});
  const platoon::DecelMatrix draws = platoon::generate_matrix(dist, 4, 1, 1, 0);
  int weak = 0;
  for (double v : draws.data()) weak += v == 4.75 ? 1 : 0;
  CHECK(weak == 1);
}

TEST_CASE("documented examples reproduce their golden output") {
  const std::string configs = std::string(PLATOON_SOURCE_DIR) + "/configs/";
  const fs::path dir = scratch("docs");

  REQUIRE(cli("campaign --config " + configs + "table1.yaml --iterations 20 "
              "--sweep D0=4.75,9.75 --seed 3 --output " + (dir / "t1").string())
              .code == 0);
  CHECK(slurp(dir / "t1" / "results.csv") ==
        "r,d_m,D0_mps2,P,N_expected,S_sum_mps,S_per_collision_mps,n,seed\n"
        "1,6,4.75,1,6.15,23.0243,3.78698,20,3\n"
        "1,6,9.75,1,6.05,24.8708,4.13924,20,3\n");

  REQUIRE(cli("campaign --config " + configs + "figures.yaml --iterations 20 "
              "--sweep d=2 --sweep D0=9.75 --seed 3 --output " + (dir / "fig").string())
              .code == 0);
  CHECK(slurp(dir / "fig" / "results.csv") ==
        "r,d_m,D0_mps2,P,N_expected,S_sum_mps,S_per_collision_mps,n,seed\n"
        "1,2,9.75,1,6.15,39.31,6.28017,20,3\n"
        "2,2,9.75,0.75,0.85,7.71871,6.74974,20,3\n"
        "3,2,9.75,0.7,0.7,6.5801,6.5801,20,3\n");
  CHECK(slurp(dir / "fig" / "figures" / "P_d2.csv") ==
        "D0_mps2,P_r1,P_r2,P_r3\n9.75,1,0.75,0.7\n");

  const Run deg = cli("validate --config " + configs + "degenerate.yaml --output " +
                      (dir / "deg").string());
  CHECK(deg.code == 0);
  CHECK(deg.out.find("combinations: 1 (1 simulated)") != std::string::npos);
  CHECK(deg.out.find("result: PASS") != std::string::npos);

  CHECK(cli("gains --config " + configs + "gains.yaml --output " + (dir / "g").string())
            .code == 0);
}
