#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string output;
};

Result run_cli(const std::string& args) {
  const fs::path log = fs::temp_directory_path() / "scooter_cli_output.txt";
  const std::string cmd = std::string("\"") + SCOOTER_SIM_PATH + "\" " + args + " > \"" +
                          log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  r.output = ss.str();
  return r;
}

std::string scenario(const std::string& name) {
  return "\"" + (fs::path(SCOOTER_SCENARIO_DIR) / name).string() + "\"";
}

fs::path out_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("scooter_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

std::size_t line_count(const fs::path& file) {
  std::ifstream in(file);
  std::size_t n = 0;
  std::string line;
  while (std::getline(in, line)) ++n;
  return n;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("simulate writes CSV, SVG and summary") {
  const fs::path out = out_dir("sim");
  const Result r = run_cli("simulate --scenario " + scenario("paper_scenario_pdflu.json") +
                           " --out \"" + out.string() + "\"");
  INFO(r.output);
  CHECK(r.code == 0);
  CHECK(line_count(out / "paper_scenario_pdflu.csv") == 20002);
  CHECK(fs::exists(out / "paper_scenario_pdflu.svg"));
  std::ifstream in(out / "paper_scenario_pdflu.summary.json");
  const nlohmann::json s = nlohmann::json::parse(in);
  CHECK(s["verdicts"]["theta"]["contained"] == true);
  CHECK(s["capsized"] == false);
}

TEST_CASE("emit selection and overrides") {
  const fs::path out = out_dir("emit");
  const Result r = run_cli("simulate --scenario " + scenario("paper_scenario_pd.json") +
                           " --out \"" + out.string() +
                           "\" --emit summary --set integration.horizon=1 --set gains.kd=160");
  INFO(r.output);
  CHECK(r.code == 0);
  CHECK_FALSE(fs::exists(out / "paper_scenario_pd.csv"));
  std::ifstream in(out / "paper_scenario_pd.summary.json");
  const nlohmann::json s = nlohmann::json::parse(in);
  CHECK(s["horizon"] == 1.0);
}

TEST_CASE("capsize exits with code 4 and keeps the truncated trajectory") {
  const fs::path out = out_dir("capsize");
  const Result r = run_cli("simulate --scenario " + scenario("constant_steer_none.json") +
                           " --out \"" + out.string() + "\"");
  INFO(r.output);
  CHECK(r.code == 4);
  const std::size_t n = line_count(out / "constant_steer_none.csv");
  CHECK(n > 2);
  CHECK(n < 5002);
}

TEST_CASE("configuration errors exit with code 2") {
  const fs::path out = out_dir("errors");
  CHECK(run_cli("simulate --scenario /nonexistent.json --out \"" + out.string() + "\"").code == 2);
  CHECK(run_cli("simulate --scenario " + scenario("paper_scenario_pd.json") + " --out \"" +
                out.string() + "\" --set gains.ki=3")
            .code == 2);
  CHECK(run_cli("simulate").code == 2);
  CHECK(run_cli("frobnicate").code == 2);
}

TEST_CASE("unwritable output exits with code 3") {
  const Result r = run_cli("simulate --scenario " + scenario("paper_scenario_pd.json") +
                           " --out /proc/scooter-not-writable --set integration.horizon=0.1");
  INFO(r.output);
  CHECK(r.code == 3);
}

TEST_CASE("verify prints one line per criterion") {
  const Result r = run_cli("verify --filter 1");
  INFO(r.output);
  CHECK(r.code == 0);
  CHECK(r.output.find("[PASS]") != std::string::npos);

  const Result bad = run_cli("verify --filter 3 --set gains.kd=0");
  INFO(bad.output);
  CHECK(bad.code == 1);
  CHECK(bad.output.find("[FAIL]") != std::string::npos);
  CHECK(bad.output.find("precondition") != std::string::npos);
}

TEST_CASE("sweep writes one row per cell") {
  const fs::path out = out_dir("sweep");
  const Result r = run_cli("sweep --scenario " + scenario("paper_scenario_pd.json") + " --grid " +
                           scenario("grid_kd.json") + " --out \"" + out.string() + "\" --threads 2");
  INFO(r.output);
  CHECK(r.code == 0);
  CHECK(line_count(out / "sweep.csv") == 4);
}

}  // TEST_SUITE
