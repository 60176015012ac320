#include "sacbf/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Sampled-data barrier-function controller simulator"};

  sacbf::RunManifest manifest;
  std::string controller = "all";
  std::vector<double> headings;
  unsigned long long seed = 0;
  bool no_strict = false;

  app.add_option("--scenario", manifest.scenario_path, "Scenario file")->required()->check(CLI::ExistingFile);
  app.add_option("--controller", controller, "Controller to run")
      ->check(CLI::IsMember({"hocbf", "sacbf", "r-sacbf", "all"}));
  app.add_option("--heading", headings, "Initial heading in radians (repeatable)");
  app.add_option("--out", manifest.output_dir, "Output directory");
  auto* seed_opt = app.add_option("--seed", seed, "Seed for the Lipschitz estimator");
  app.add_option("--jobs", manifest.jobs, "Concurrent runs")->check(CLI::PositiveNumber);
  app.add_flag("--emit-figure-data", manifest.emit_figure_data, "Write trajectory and per-chain psi series");
  app.add_flag("--no-strict", no_strict, "Do not fail on audit violations");

  CLI11_PARSE(app, argc, argv);

  if (controller == "all") {
    manifest.controllers = {sacbf::ControllerKind::kHocbf, sacbf::ControllerKind::kSacbf,
                            sacbf::ControllerKind::kRelaxedSacbf};
  } else {
    manifest.controllers = {sacbf::parse_controller(controller)};
  }
  if (*seed_opt) manifest.seed = seed;
  manifest.overrides = sacbf::heading_overrides(headings);
  manifest.strict = !no_strict;

  return sacbf::run_cli(manifest, std::cout);
}
