#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kFixtures = FIXTURE_DIR;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "pcminimax_cli_test" / name;
  fs::remove_all(dir);
  return dir;
}

int run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + "\"" + PCMINIMAX_CLI + "\" " + args + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

int run_config(const std::string& sub, const std::string& fixture, const fs::path& out,
               const std::string& extra = "", const std::string& env = "") {
  return run(sub + " --config \"" + (kFixtures / fixture).string() + "\" --out \"" + out.string() + "\" " + extra,
             env);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("solve reports the golden-ratio value") {
  const auto out = scratch("solve");
  REQUIRE(run_config("solve", "scalar_pair.json", out) == 0);
  const json doc = read_json(out / "solve.json");
  const double P = doc["P"];
  CHECK(std::abs(doc["value"].get<double>() - P * (3.0 + std::sqrt(5.0)) / 2.0) <= 1e-10 * P);
  CHECK(doc["eigen"]["converged"] == true);
  CHECK(std::abs(doc["eigen"]["gap"].get<double>() - std::sqrt(5.0)) <= 1e-10);
  CHECK(doc["admissibility"]["pass"] == true);
  CHECK(std::abs(doc["least_favorable"]["trace_power"].get<double>() - P) <= 1e-12 * P);
  CHECK(doc["value"].get<double>() <= doc["upper_bound"].get<double>());
  CHECK(doc["warnings"].empty());
  CHECK_FALSE(fs::exists(out / "operator.csv"));
}

TEST_CASE("zero weight gives value 0 with a warning") {
  const auto out = scratch("zero");
  REQUIRE(run_config("solve", "zero_weight.json", out) == 0);
  const json doc = read_json(out / "solve.json");
  CHECK(doc["value"].get<double>() == 0.0);
  REQUIRE_FALSE(doc["warnings"].empty());
  CHECK(doc["warnings"][0].get<std::string>().find("minimax value is 0") != std::string::npos);
}

TEST_CASE("missing weight CSV is a config error with no outputs") {
  const auto out = scratch("missing");
  CHECK(run_config("solve", "missing_csv.json", out) == 2);
  CHECK_FALSE(fs::exists(out));
  // without --out the config's own output dir must not appear either
  CHECK(run("solve --config \"" + (kFixtures / "missing_csv.json").string() + "\"") == 2);
  CHECK_FALSE(fs::exists(kFixtures / "missing_csv_out"));
}

TEST_CASE("optional CSV outputs and sampled-grid weights") {
  const auto out = scratch("csv");
  REQUIRE(run_config("solve", "sampled_grid.json", out) == 0);
  const auto op = read_csv(out / "operator.csv");
  REQUIRE(op.size() == 1 + 16);
  CHECK(op[0] == std::vector<std::string>{"row", "col", "real", "imag"});
  const auto spectral = read_csv(out / "spectral.csv");
  CHECK(spectral.size() == 1 + 32 * 4);
  const auto trace = read_csv(out / "trace.csv");
  CHECK(trace.size() >= 2);
  CHECK(trace[0] == std::vector<std::string>{"iter", "rayleigh", "residual"});
}

TEST_CASE("verify passes, detects a wrong target and rejects zero replicates") {
  const auto out = scratch("verify");
  CHECK(run_config("verify", "scalar_pair.json", out) == 0);
  const json doc = read_json(out / "verify.json");
  CHECK(doc["replicates"] == 100000);
  CHECK(std::abs(doc["z_score"].get<double>()) <= 4.0);
  CHECK(doc["pass"] == true);
  CHECK(doc["analytic_defect"].get<double>() <= 1e-10);

  const auto bad = scratch("verify_bad");
  CHECK(run_config("verify", "scalar_pair.json", bad, "--inject-target-offset 1.0") == 1);
  CHECK(read_json(bad / "verify.json")["pass"] == false);

  const auto zero = scratch("verify_zero");
  CHECK(run_config("verify", "zero_replicates.json", zero) == 2);
  CHECK_FALSE(fs::exists(zero));
}

TEST_CASE("seed override from the environment") {
  const auto a = scratch("seed_a");
  const auto b = scratch("seed_b");
  REQUIRE(run_config("verify", "scalar_pair.json", a, "", "PCMINIMAX_SEED=123") == 0);
  REQUIRE(run_config("verify", "scalar_pair.json", b, "", "PCMINIMAX_SEED=123") == 0);
  CHECK(read_json(a / "verify.json")["seed"] == 123);
  CHECK(slurp(a / "verify.json") == slurp(b / "verify.json"));
  CHECK(run_config("verify", "scalar_pair.json", scratch("seed_bad"), "", "PCMINIMAX_SEED=abc") == 2);
}

TEST_CASE("verify output does not depend on the thread count") {
  const auto one = scratch("threads_1");
  const auto four = scratch("threads_4");
  REQUIRE(run_config("verify", "scalar_pair.json", one, "--threads 1") == 0);
  REQUIRE(run_config("verify", "scalar_pair.json", four, "--threads 4") == 0);
  CHECK(slurp(one / "verify.json") == slurp(four / "verify.json"));
}

TEST_CASE("sweep over geometric decay shrinks geometrically") {
  const auto out = scratch("sweep_geo");
  REQUIRE(run_config("sweep", "geometric_decay.json", out) == 0);
  const auto rows = read_csv(out / "sweep.csv");
  REQUIRE(rows.size() == 6);
  CHECK(rows[0] == std::vector<std::string>{"N", "nu2", "gap", "tail_norm", "defect_bound"});
  std::vector<double> nu2, bound;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    nu2.push_back(std::stod(rows[i][1]));
    bound.push_back(std::stod(rows[i][4]));
  }
  const double last = nu2.back();
  for (std::size_t i = 0; i + 1 < nu2.size(); ++i) {
    CHECK(nu2[i] <= nu2[i + 1] * (1 + 1e-12));
    CHECK(std::abs(last - nu2[i]) <= bound[i]);
  }
  for (std::size_t i = 0; i + 2 < nu2.size() - 1; ++i)
    CHECK(std::abs(nu2[i + 2] - nu2[i + 1]) < 0.5 * std::abs(nu2[i + 1] - nu2[i]));

  const auto timing = read_csv(out / "sweep_timing.csv");
  CHECK(timing.size() == 6);
  CHECK(timing[0] == std::vector<std::string>{"N", "runtime_seconds"});
}

TEST_CASE("sweep with finite support saturates at N = J - 1") {
  const auto out = scratch("sweep_finite");
  REQUIRE(run_config("sweep", "finite_support.json", out) == 0);
  const auto rows = read_csv(out / "sweep.csv");
  REQUIRE(rows.size() == 5);
  // support covers blocks 0..2
  const double saturated = std::stod(rows[2][1]);
  for (std::size_t i = 3; i < rows.size(); ++i) CHECK(std::abs(std::stod(rows[i][1]) - saturated) <= 1e-12 * saturated);
  CHECK(std::stod(rows[1][1]) < saturated);
  CHECK(std::stod(rows[2][3]) == 0.0);
}

TEST_CASE("single-N sweep matches solve") {
  const auto out = scratch("sweep_single");
  REQUIRE(run_config("sweep", "scalar_pair.json", out) == 0);
  REQUIRE(run_config("solve", "scalar_pair.json", out) == 0);
  const auto rows = read_csv(out / "sweep.csv");
  REQUIRE(rows.size() == 2);
  const json doc = read_json(out / "solve.json");
  CHECK(std::stod(rows[1][1]) == doc["nu2"].get<double>());
}

TEST_CASE("command-line errors exit with 2") {
  CHECK(run("solve") == 2);
  CHECK(run("frobnicate --config x.json") == 2);
  CHECK(run("solve --config /nonexistent/config.json --out /tmp/pcminimax_cli_test/none") == 2);
  CHECK(run("solve --config x.json --threads 0") == 2);
}
