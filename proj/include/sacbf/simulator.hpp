#pragma once

#include "sacbf/barrier.hpp"
#include "sacbf/constraint_qp.hpp"
#include "sacbf/dynamics.hpp"
#include "sacbf/taylor_bound.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sacbf {

enum class ControllerKind { kHocbf, kSacbf, kRelaxedSacbf };
enum class InfeasibilityPolicy { kHoldPrevious, kZeroInput };

std::string to_string(ControllerKind kind);
/// Accepts "hocbf", "sacbf", "r-sacbf" and "r_sacbf".
ControllerKind parse_controller(const std::string& text);
std::string to_string(InfeasibilityPolicy policy);
InfeasibilityPolicy parse_policy(const std::string& text);

/// Declarative barrier chain, turned into a BarrierChain against the model.
struct ChainDecl {
  std::string id;
  ChainTag tag = ChainTag::kSafety;
  std::vector<ClassKappaPower> alphas;
  /// Relaxation weight q_k (used by the relaxed controller only).
  double weight = 1.0;

  // safety
  Eigen::VectorXd center;
  double radius = 0.0;
  double norm_order = 2.0;
  NormForm form = NormForm::kPowered;

  // reach
  ReachSpec reach;
};

struct ScenarioConfig {
  std::string name = "scenario";
  std::string model = "unicycle";
  Eigen::VectorXd initial_state;
  double t0 = 0.0;
  double dt = 0.1;
  double horizon = 1.0;
  ControllerKind controller = ControllerKind::kRelaxedSacbf;
  std::vector<ChainDecl> chains;
  InputBox input_box;
  BoundSettings bound;
  InfeasibilityPolicy policy = InfeasibilityPolicy::kHoldPrevious;
  /// Dense audit spacing; 0 selects dt / 100.
  double audit_substep = 0.0;
  double integrator_tolerance = 1e-10;

  double effective_substep() const { return audit_substep > 0.0 ? audit_substep : dt / 100.0; }
  /// Number of sampling intervals; horizon must be a multiple of dt.
  int step_count() const;
  /// Throws ContractViolation naming the offending field.
  void validate() const;
};

SystemModel make_model(const std::string& id);
std::vector<BarrierChain> build_chains(const ScenarioConfig& config, const SystemModel& model);

/// Integrates xdot = f + g u with u held constant over [t_k, t_k + dt]
/// (adaptive Dormand-Prince, absolute and relative tolerance `tolerance`).
/// Throws SimulationAbort on step-size underflow or a non-finite state.
Eigen::VectorXd step_zoh(const SystemModel& model, const Eigen::VectorXd& input, const Eigen::VectorXd& state,
                         double t_k, double dt, double tolerance = 1e-10);

/// Same flow sampled at every entry of `times` (ascending, first = t_k).
std::vector<Eigen::VectorXd> integrate_zoh(const SystemModel& model, const Eigen::VectorXd& input,
                                           const Eigen::VectorXd& state, const std::vector<double>& times,
                                           double tolerance = 1e-10);

enum class StepStatus { kOptimal, kInfeasible, kSetExit };
std::string to_string(StepStatus status);

struct ChainStepRecord {
  std::string chain_id;
  bool active = false;
  std::size_t piece = 0;
  std::vector<double> psi;  ///< psi_0 .. psi_{m-1} at t_k
  double comparison_bound = 0.0;
  double m_bar = 0.0;
  double m_hat = 0.0;
  double correction = 0.0;
  double tube_radius = 0.0;
  bool has_bound = false;
  double omega = 1.0;
  double slack = 0.0;
  bool has_row = false;
  SacbfRow row;
};

struct StepRecord {
  std::size_t index = 0;
  double t = 0.0;
  Eigen::VectorXd state;
  Eigen::VectorXd input;
  StepStatus status = StepStatus::kOptimal;
  std::string note;
  std::vector<ChainStepRecord> chains;  ///< same order as TraceLog::chain_ids
};

/// Dense-grid state on [t_k, t_k + dt]; both interval endpoints are included.
struct DenseState {
  std::size_t step = 0;
  double t = 0.0;
  Eigen::VectorXd state;
};

struct AuditSample {
  double t = 0.0;
  std::string chain_id;
  double psi_top = 0.0;
  double psi0 = 0.0;
};

struct TraceLog {
  std::string scenario;
  ControllerKind controller = ControllerKind::kRelaxedSacbf;
  std::vector<std::string> state_names;
  int input_dim = 0;
  double dt = 0.0;
  double substep = 0.0;
  std::vector<std::string> chain_ids;
  std::vector<int> chain_levels;
  std::vector<StepRecord> steps;
  std::vector<DenseState> dense;
  std::vector<AuditSample> audit;
  Eigen::VectorXd final_state;
  double final_time = 0.0;
};

/// Runs the zero-order-hold closed loop for config.step_count() intervals.
/// Throws ContractViolation when the initial state is outside any set of an
/// initially active chain.
TraceLog run_scenario(const ScenarioConfig& config);

struct AuditViolation {
  std::size_t step = 0;
  std::string chain_id;
  double tau = 0.0;
  std::string check;
  double value = 0.0;  ///< amount by which the check fails
};

struct AuditReport {
  std::size_t steps_checked = 0;
  std::vector<AuditViolation> violations;
  /// Steps (any controller with a bound) whose m_bar is below the realized
  /// dense-grid max |psi_{m-1}''|, and dense states outside the tube.
  std::size_t dominance_checked = 0;
  std::size_t dominance_violations = 0;
  std::size_t tube_violations = 0;
  double worst_dominance_ratio = 0.0;  ///< max |psi''| / m_bar over checked steps

  bool ok() const { return violations.empty(); }
};

/// Re-evaluates the chains along the dense states of `trace`. For every step
/// whose sampled-data rows were solved to optimality it checks
///   (a) psi_{m-1} >= -tolerance on the dense grid,
///   (b) psi_{m-1}(t_k + dt) >= omega * L - tolerance,
///   (c) the quadratic l(tau) = psi + tau psi' - m_bar tau^2 / 2 is >= -tolerance
///       and lies below the realized psi_{m-1}(t_k + tau) + tolerance.
/// Bound dominance and tube containment are counted separately.
AuditReport audit_invariance(const TraceLog& trace, const std::vector<BarrierChain>& chains, double tolerance);

struct RunSummary {
  std::map<std::string, double> min_psi0;
  std::map<std::string, double> min_psi_top;
  std::optional<double> first_violation_time;
  std::size_t steps = 0;
  std::size_t infeasible_steps = 0;
  std::size_t set_exit_steps = 0;
  std::map<std::string, std::optional<double>> reach_time;
  std::size_t audit_violations = 0;
  std::size_t dominance_violations = 0;
  std::size_t tube_violations = 0;
  double worst_dominance_ratio = 0.0;
};

/// Minima of psi over the dense grid (only while a chain is active), first
/// time any active psi_0 drops below -tolerance, and for reach chains the
/// first dense time within eps_d (+1e-6) of the center inside the window.
RunSummary summarize(const ScenarioConfig& config, const TraceLog& trace, const AuditReport& audit,
                     double tolerance = 1e-6);

/// Shortest round-trip decimal form; "nan", "inf", "-inf" otherwise.
std::string format_number(double value);

void write_trace_csv(std::ostream& out, const TraceLog& trace);
void write_audit_csv(std::ostream& out, const TraceLog& trace);
void write_summary(std::ostream& out, const ScenarioConfig& config, const RunSummary& summary);
/// t, psi_0 .. psi_{m-1} on the dense grid for one chain (NaN outside its window).
void write_figure_csv(std::ostream& out, const TraceLog& trace, const std::vector<BarrierChain>& chains,
                      std::size_t chain_index);
/// t, state on the dense grid.
void write_trajectory_csv(std::ostream& out, const TraceLog& trace);

}  // namespace sacbf
