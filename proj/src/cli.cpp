#include "sacbf/cli.hpp"

#include "sacbf/errors.hpp"
#include "sacbf/scenario.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <thread>

namespace sacbf {
namespace {

namespace fs = std::filesystem;

struct Task {
  ControllerKind controller;
  std::optional<StateOverride> override_state;
};

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

RunOutcome execute(const ScenarioConfig& base, const RunManifest& manifest, const Task& task) {
  RunOutcome outcome;
  outcome.controller = task.controller;
  outcome.label = task.override_state ? task.override_state->label : "";
  const std::string dir_name = to_string(task.controller) + (outcome.label.empty() ? "" : "_" + outcome.label);
  const fs::path dir = fs::path(manifest.output_dir) / dir_name;
  outcome.directory = dir.string();
  try {
    ScenarioConfig config = base;
    config.controller = task.controller;
    if (manifest.seed) config.bound.seed = *manifest.seed;
    if (task.override_state) {
      for (const auto& [index, value] : task.override_state->values) {
        if (index < 0 || index >= config.initial_state.size())
          throw ContractViolation("state override index " + std::to_string(index) + " out of range");
        config.initial_state(index) = value;
      }
    }
    const TraceLog trace = run_scenario(config);
    const std::vector<BarrierChain> chains = build_chains(config, make_model(config.model));
    const AuditReport audit = audit_invariance(trace, chains, 1e-6);
    outcome.summary = summarize(config, trace, audit);

    fs::create_directories(dir);
    {
      auto out = open_output(dir / "trace.csv");
      write_trace_csv(out, trace);
    }
    {
      auto out = open_output(dir / "audit.csv");
      write_audit_csv(out, trace);
    }
    {
      auto out = open_output(dir / "summary.txt");
      write_summary(out, config, outcome.summary);
    }
    if (!audit.violations.empty()) {
      auto out = open_output(dir / "violations.csv");
      out << "step,chain_id,tau,check,amount\n";
      for (const auto& v : audit.violations)
        out << v.step << ',' << v.chain_id << ',' << format_number(v.tau) << ',' << v.check << ','
            << format_number(v.value) << '\n';
    }
    if (manifest.emit_figure_data) {
      auto traj = open_output(dir / "trajectory.csv");
      write_trajectory_csv(traj, trace);
      for (std::size_t c = 0; c < chains.size(); ++c) {
        auto out = open_output(dir / ("psi_" + chains[c].id() + ".csv"));
        write_figure_csv(out, trace, chains, c);
      }
    }
    outcome.completed = true;
  } catch (const std::exception& e) {
    outcome.error = e.what();
  }
  return outcome;
}

}  // namespace

std::vector<StateOverride> heading_overrides(const std::vector<double>& headings) {
  std::vector<StateOverride> out;
  for (double h : headings) out.push_back({"heading_" + format_number(h), {{2, h}}});
  return out;
}

int run_cli(const RunManifest& manifest, std::ostream& log, std::vector<RunOutcome>* outcomes) {
  ScenarioConfig base;
  try {
    base = load_scenario(manifest.scenario_path);
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return 2;
  }
  std::vector<Task> tasks;
  const std::vector<ControllerKind> controllers =
      manifest.controllers.empty() ? std::vector<ControllerKind>{base.controller} : manifest.controllers;
  if (manifest.overrides.empty()) {
    for (auto c : controllers) tasks.push_back({c, std::nullopt});
  } else {
    for (const auto& o : manifest.overrides)
      for (auto c : controllers) tasks.push_back({c, o});
  }

  try {
    fs::create_directories(manifest.output_dir);
  } catch (const std::exception& e) {
    log << "error: cannot create output directory '" << manifest.output_dir << "': " << e.what() << '\n';
    return 2;
  }

  std::vector<RunOutcome> results(tasks.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      results[i] = execute(base, manifest, tasks[i]);
      const RunOutcome& r = results[i];
      std::lock_guard<std::mutex> lock(log_mutex);
      log << r.directory << ": ";
      if (!r.completed) {
        log << "FAILED (" << r.error << ")\n";
        continue;
      }
      const RunSummary& s = r.summary;
      log << "infeasible_steps=" << s.infeasible_steps + s.set_exit_steps << " first_violation="
          << (s.first_violation_time ? format_number(*s.first_violation_time) : "none")
          << " audit_violations=" << s.audit_violations << " dominance_violations=" << s.dominance_violations
          << " tube_violations=" << s.tube_violations << '\n';
    }
  };
  const int jobs = std::max(1, std::min<int>(manifest.jobs, static_cast<int>(tasks.size())));
  std::vector<std::thread> threads;
  for (int j = 1; j < jobs; ++j) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();

  int status = 0;
  for (const auto& r : results) {
    if (!r.completed) {
      status = 1;
    } else if (manifest.strict && (r.summary.audit_violations > 0 || r.summary.dominance_violations > 0 ||
                                   r.summary.tube_violations > 0)) {
      status = 1;
    }
  }
  if (outcomes != nullptr) *outcomes = std::move(results);
  return status;
}

}  // namespace sacbf
