#pragma once

#include "sacbf/simulator.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sacbf {

/// Initial-state entries replaced for one sweep member.
struct StateOverride {
  std::string label;
  std::map<int, double> values;
};

struct RunManifest {
  std::string scenario_path;
  std::vector<ControllerKind> controllers;
  std::string output_dir = "out";
  std::optional<unsigned long long> seed;
  /// Empty runs the scenario's own initial state once per controller.
  std::vector<StateOverride> overrides;
  int jobs = 1;
  bool emit_figure_data = false;
  bool strict = true;
};

/// One override per heading, replacing the heading entry (index 2) of the
/// unicycle state. Labels read "heading_<value>".
std::vector<StateOverride> heading_overrides(const std::vector<double>& headings);

struct RunOutcome {
  std::string directory;
  std::string label;
  ControllerKind controller = ControllerKind::kRelaxedSacbf;
  bool completed = false;
  std::string error;
  RunSummary summary;
};

/// Runs every (override, controller) pair, each into its own directory
/// <output_dir>/<controller>[_<label>] holding trace.csv, audit.csv and
/// summary.txt (plus figure data when requested). Progress goes to `log`.
/// Returns 0 iff every run completed and, in strict mode, no run reported an
/// audit, bound-dominance or tube violation.
int run_cli(const RunManifest& manifest, std::ostream& log, std::vector<RunOutcome>* outcomes = nullptr);

}  // namespace sacbf
