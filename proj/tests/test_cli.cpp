#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "rsc/radial_ode.hpp"
#include "rsc/run.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::path(RSC_WORK_DIR) / "cli";

fs::path write_config(const std::string& name, const std::string& text) {
  fs::create_directories(kWork);
  const fs::path path = kWork / (name + ".json");
  std::ofstream(path) << text;
  return path;
}

int cli(const std::string& command, const fs::path& config, const fs::path& out,
        const std::string& env = "") {
  fs::remove_all(out);
  const std::string line = env + " \"" RSC_CLI_PATH "\" " + command + " --config \"" + config.string() +
                           "\" --out \"" + out.string() + "\" 2>/dev/null";
  const int raw = std::system(line.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::ifstream in(path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    std::string cell;
    std::istringstream s(line);
    while (std::getline(s, cell, ',')) row.push_back(cell);
    if (!line.empty() && line.back() == ',') row.push_back("");
    rows.push_back(row);
  }
  return rows;
}

const char* kSolveConfig = R"({"n": 3, "prescription": {"family": "power-deficit", "c": 0.3, "p": 2}, "r_max": 20})";

}  // namespace

TEST_CASE("solve is byte-identical across runs") {
  const auto cfg = write_config("solve", kSolveConfig);
  REQUIRE(cli("solve", cfg, kWork / "solve_a") == 0);
  REQUIRE(cli("solve", cfg, kWork / "solve_b") == 0);
  CHECK(slurp(kWork / "solve_a" / "solution.csv") == slurp(kWork / "solve_b" / "solution.csv"));
  CHECK(slurp(kWork / "solve_a" / "report.json") == slurp(kWork / "solve_b" / "report.json"));
}

TEST_CASE("solution.csv round-trips the in-process solve") {
  const auto cfg = write_config("solve", kSolveConfig);
  REQUIRE(cli("solve", cfg, kWork / "solve_rt") == 0);
  const auto rows = read_csv(kWork / "solve_rt" / "solution.csv");
  REQUIRE(rows.front() == rsc::kSolutionColumns);
  const auto sol = rsc::solve_radial(rsc::families::power_deficit(3, 0.3, 2.0), 20.0, 1e-10);
  REQUIRE(rows.size() == sol.size() + 1);
  for (std::size_t k = 0; k < sol.size(); ++k) {
    CHECK(std::strtod(rows[k + 1][0].c_str(), nullptr) == sol.r()[k]);
    CHECK(std::strtod(rows[k + 1][1].c_str(), nullptr) == sol.s()[k]);
    CHECK(std::strtod(rows[k + 1][4].c_str(), nullptr) == sol.phi()[k]);
  }
  const auto report = nlohmann::json::parse(slurp(kWork / "solve_rt" / "report.json"));
  CHECK(report["classification"] == "Bounded");
  CHECK(report["violated"].empty());
  CHECK(report["config"]["prescription"]["p"] == 2.0);
}

TEST_CASE("a perturbed solution exits with status 4") {
  const auto cfg = write_config(
      "fault", R"({"n": 3, "prescription": {"family": "power-deficit", "c": 0.3, "p": 2}, "r_max": 20, "fault": "perturb-s"})");
  CHECK(cli("solve", cfg, kWork / "fault") == 4);
  const auto report = nlohmann::json::parse(slurp(kWork / "fault" / "report.json"));
  CHECK(report["violated"] == nlohmann::json::array({"f2_residual"}));
}

TEST_CASE("configuration errors exit with status 2") {
  CHECK(cli("solve", write_config("bad_key", R"({"nn": 3})"), kWork / "bad_key") == 2);
  CHECK(cli("solve", kWork / "missing.json", kWork / "missing") == 2);
  CHECK(cli("bogus", write_config("ok", "{}"), kWork / "bogus") == 2);
  const auto big = write_config("big", R"({"sweep": {"c": [0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,0.95,0.96],
      "p": [1,2,3,4,5,6,7,8,9,10], "q": [1,2,3,4,5,6,7,8,9,10]}})");
  CHECK(cli("sweep", big, kWork / "big") == 2);
}

TEST_CASE("solver failures exit with status 3") {
  const auto cfg = write_config("neg", R"({"prescription": {"family": "constant", "value": -1}})");
  CHECK(cli("solve", cfg, kWork / "neg") == 3);
  const auto report = nlohmann::json::parse(slurp(kWork / "neg" / "report.json"));
  CHECK(report.contains("error"));
}

TEST_CASE("classify reports Unbounded for c = 0.1, p = 1") {
  const auto cfg = write_config("classify", R"({"prescription": {"family": "power-deficit", "c": 0.1, "p": 1}})");
  REQUIRE(cli("classify", cfg, kWork / "classify") == 0);
  const auto report = nlohmann::json::parse(slurp(kWork / "classify" / "report.json"));
  CHECK(report["classification"] == "Unbounded");
}

TEST_CASE("empty sweep writes only the header") {
  const auto cfg = write_config("empty", R"({"sweep": {"c": []}})");
  REQUIRE(cli("sweep", cfg, kWork / "empty") == 0);
  const auto rows = read_csv(kWork / "empty" / "sweep_summary.csv");
  REQUIRE(rows.size() == 1);
  CHECK(rows[0] == rsc::kSweepColumns);
}

TEST_CASE("sweep rows do not depend on the thread count") {
  const auto cfg = write_config(
      "sweep", R"({"r_max": 20, "sweep": {"n": [2, 3], "c": [0.1, 0.3], "p": [0.5, 2]}})");
  REQUIRE(cli("sweep", cfg, kWork / "sweep1", "RADIAL_SIGMA2_THREADS=1") == 0);
  REQUIRE(cli("sweep", cfg, kWork / "sweep4", "RADIAL_SIGMA2_THREADS=4") == 0);
  const auto one = slurp(kWork / "sweep1" / "sweep_summary.csv");
  CHECK(one == slurp(kWork / "sweep4" / "sweep_summary.csv"));
  const auto rows = read_csv(kWork / "sweep1" / "sweep_summary.csv");
  REQUIRE(rows.size() == 9);
  CHECK(rows[1][0] == "2");
  CHECK(rows[1][2] == "0.10000000000000001");
  CHECK(rows[1][6] == "Unbounded");
  CHECK(rows[2][6] == "Bounded");
}

TEST_CASE("sweep records per-row failures") {
  const auto cfg = write_config("sweep_err", R"({"r_max": 10, "sweep": {"c": [0.3, 1.5], "p": [2]}})");
  REQUIRE(cli("sweep", cfg, kWork / "sweep_err") == 0);
  const auto rows = read_csv(kWork / "sweep_err" / "sweep_summary.csv");
  REQUIRE(rows.size() == 3);
  CHECK(rows[1].back().empty());
  CHECK_FALSE(rows[2].back().empty());
}

TEST_CASE("barriers and verify write their artifacts") {
  const auto bcfg = write_config(
      "barriers", R"({"n": 3, "prescription": {"family": "directional", "a": 0.2, "p": 2}, "eps0": 0.05})");
  REQUIRE(cli("barriers", bcfg, kWork / "barriers") == 0);
  CHECK(read_csv(kWork / "barriers" / "barriers.csv").front() == rsc::kBarrierColumns);
  const auto vcfg = write_config(
      "verify", R"({"n": 2, "prescription": {"family": "constant", "value": 1}, "r_max": 5,
                   "verify": {"box": [-1, 1], "spacings": [0.04, 0.02]}})");
  REQUIRE(cli("verify", vcfg, kWork / "verify") == 0);
  const auto rows = read_csv(kWork / "verify" / "patch_residuals.csv");
  REQUIRE(rows.size() == 3);
  CHECK(rows.front() == rsc::kPatchColumns);
}
