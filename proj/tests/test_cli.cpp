#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "sacbf/cli.hpp"

#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace sacbf;
namespace fs = std::filesystem;

namespace {

const std::string kScenarios = std::string(SACBF_SOURCE_DIR) + "/scenarios/";

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("sacbf_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("heading overrides") {
  const auto o = heading_overrides({0.0, std::numbers::pi / 2});
  REQUIRE(o.size() == 2);
  CHECK(o[0].values.at(2) == 0.0);
  CHECK(o[0].label == "heading_0");
  CHECK(o[1].label == "heading_1.5707963267948966");
}

TEST_CASE("first case sweep writes one directory per run") {
  const fs::path out = fresh_dir("sweep");
  RunManifest m;
  m.scenario_path = kScenarios + "case1.cfg";
  m.controllers = {ControllerKind::kHocbf, ControllerKind::kSacbf, ControllerKind::kRelaxedSacbf};
  m.overrides = heading_overrides({0.0, std::numbers::pi / 12, std::numbers::pi / 6, std::numbers::pi / 2});
  m.output_dir = out.string();
  m.jobs = 4;
  m.strict = false;
  std::ostringstream log;
  std::vector<RunOutcome> outcomes;
  CHECK(run_cli(m, log, &outcomes) == 0);
  REQUIRE(outcomes.size() == 12);
  int traces = 0, summaries = 0;
  for (const auto& entry : fs::recursive_directory_iterator(out)) {
    if (entry.path().filename() == "trace.csv") ++traces;
    if (entry.path().filename() == "summary.txt") ++summaries;
  }
  CHECK(traces == 12);
  CHECK(summaries == 12);
  CHECK(fs::exists(out / "r-sacbf_heading_0" / "audit.csv"));
  const std::string summary = slurp(out / "hocbf_heading_0" / "summary.txt");
  CHECK(summary.find("controller = hocbf") != std::string::npos);
  CHECK(summary.find("initial_state = -3 0 0 1") != std::string::npos);
  for (const auto& o : outcomes) CHECK(o.completed);
  fs::remove_all(out);
}

TEST_CASE("figure data and reproducibility") {
  const fs::path a = fresh_dir("fig_a");
  const fs::path b = fresh_dir("fig_b");
  RunManifest m;
  m.scenario_path = kScenarios + "case1.cfg";
  m.controllers = {ControllerKind::kRelaxedSacbf};
  m.emit_figure_data = true;
  m.strict = false;
  m.seed = 5;
  std::ostringstream log;
  m.output_dir = a.string();
  run_cli(m, log);
  m.output_dir = b.string();
  m.jobs = 2;
  run_cli(m, log);
  CHECK(fs::exists(a / "r-sacbf" / "trajectory.csv"));
  CHECK(fs::exists(a / "r-sacbf" / "psi_obstacle.csv"));
  CHECK(fs::exists(a / "r-sacbf" / "psi_target.csv"));
  CHECK(slurp(a / "r-sacbf" / "psi_obstacle.csv").rfind("t,psi0,psi1\n", 0) == 0);
  CHECK(slurp(a / "r-sacbf" / "summary.txt") == slurp(b / "r-sacbf" / "summary.txt"));
  CHECK(slurp(a / "r-sacbf" / "trace.csv") == slurp(b / "r-sacbf" / "trace.csv"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("I/O failures give a nonzero exit") {
  std::ostringstream log;
  RunManifest missing;
  missing.scenario_path = kScenarios + "nope.cfg";
  missing.controllers = {ControllerKind::kHocbf};
  missing.output_dir = fresh_dir("missing").string();
  CHECK(run_cli(missing, log) != 0);

  const fs::path blocker = fresh_dir("blocker");
  { std::ofstream(blocker) << "a file, not a directory"; }
  RunManifest blocked;
  blocked.scenario_path = kScenarios + "case1.cfg";
  blocked.controllers = {ControllerKind::kHocbf};
  blocked.output_dir = (blocker / "sub").string();
  CHECK(run_cli(blocked, log) != 0);
  fs::remove_all(blocker);
}
