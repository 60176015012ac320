#include "sacbf/simulator.hpp"

#include "sacbf/errors.hpp"
#include "sacbf/invariance_bounds.hpp"
#include "sacbf/qp_solver.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

namespace sacbf {
namespace {

namespace odeint = boost::numeric::odeint;
using OdeState = std::vector<double>;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kTimeTol = 1e-9;

Eigen::VectorXd to_eigen(const OdeState& s) { return Eigen::Map<const Eigen::VectorXd>(s.data(), s.size()); }

bool step_active(const BarrierChain& chain, double t_k, double dt) {
  const TimeWindow w = chain.window();
  return t_k >= w.begin - kTimeTol && t_k + dt <= w.end + kTimeTol;
}

std::vector<double> dense_times(double t_k, double dt, double substep) {
  const int count = std::max(1, static_cast<int>(std::ceil(dt / substep - 1e-9)));
  std::vector<double> times(static_cast<std::size_t>(count) + 1);
  for (int j = 0; j <= count; ++j) times[static_cast<std::size_t>(j)] = t_k + dt * j / count;
  return times;
}

}  // namespace

std::string to_string(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::kHocbf: return "hocbf";
    case ControllerKind::kSacbf: return "sacbf";
    case ControllerKind::kRelaxedSacbf: return "r-sacbf";
  }
  return "unknown";
}

ControllerKind parse_controller(const std::string& text) {
  if (text == "hocbf") return ControllerKind::kHocbf;
  if (text == "sacbf") return ControllerKind::kSacbf;
  if (text == "r-sacbf" || text == "r_sacbf") return ControllerKind::kRelaxedSacbf;
  throw ContractViolation("unknown controller '" + text + "'");
}

std::string to_string(InfeasibilityPolicy policy) {
  return policy == InfeasibilityPolicy::kHoldPrevious ? "hold-previous" : "zero-input";
}

InfeasibilityPolicy parse_policy(const std::string& text) {
  if (text == "hold-previous") return InfeasibilityPolicy::kHoldPrevious;
  if (text == "zero-input") return InfeasibilityPolicy::kZeroInput;
  throw ContractViolation("unknown infeasibility policy '" + text + "'");
}

std::string to_string(StepStatus status) {
  switch (status) {
    case StepStatus::kOptimal: return "optimal";
    case StepStatus::kInfeasible: return "infeasible";
    case StepStatus::kSetExit: return "set_exit";
  }
  return "unknown";
}

int ScenarioConfig::step_count() const {
  const double ratio = horizon / dt;
  const double rounded = std::round(ratio);
  if (!(rounded >= 1.0) || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio))
    throw ContractViolation("horizon must be a positive multiple of dt");
  return static_cast<int>(rounded);
}

void ScenarioConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ContractViolation("dt: must be > 0");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ContractViolation("horizon: must be > 0");
  step_count();
  const SystemModel m = make_model(model);
  if (initial_state.size() != m.state_dim)
    throw ContractViolation("initial_state: expected " + std::to_string(m.state_dim) + " entries");
  if (!initial_state.allFinite()) throw ContractViolation("initial_state: must be finite");
  if (input_box.dim() != m.input_dim)
    throw ContractViolation("input bounds: expected " + std::to_string(m.input_dim) + " entries");
  if (!(audit_substep >= 0.0) || audit_substep > dt) throw ContractViolation("audit_substep: must be in [0, dt]");
  if (!(integrator_tolerance > 0.0) || integrator_tolerance > 1e-9)
    throw ContractViolation("integrator_tolerance: must be in (0, 1e-9]");
  if (bound.nodes < 3 || bound.nodes > 7) throw ContractViolation("nodes: must be in [3, 7]");
  if (!(bound.safety_factor >= 1.0)) throw ContractViolation("safety_factor: must be >= 1");
  if (bound.lipschitz_samples < 2) throw ContractViolation("lipschitz_samples: must be >= 2");
  if (bound.certify_iterations < 1) throw ContractViolation("certify_iterations: must be >= 1");
  if (!(bound.certify_margin >= 0.0)) throw ContractViolation("certify_margin: must be >= 0");
  if (chains.empty()) throw ContractViolation("chains: at least one barrier chain is required");
  for (std::size_t i = 0; i < chains.size(); ++i) {
    const ChainDecl& c = chains[i];
    if (c.id.empty()) throw ContractViolation("chain id: must not be empty");
    for (std::size_t j = 0; j < i; ++j)
      if (chains[j].id == c.id) throw ContractViolation("chain id '" + c.id + "': duplicate");
    if (c.alphas.empty()) throw ContractViolation(c.id + ".lambda: at least one level required");
    if (!(c.weight > 0.0)) throw ContractViolation(c.id + ".weight: must be > 0");
    if (c.tag == ChainTag::kSafety) {
      if (c.center.size() != 2) throw ContractViolation(c.id + ".center: expected 2 entries");
      if (!(c.radius > 0.0)) throw ContractViolation(c.id + ".radius: must be > 0");
    } else {
      try {
        c.reach.validate();
      } catch (const ContractViolation& e) {
        throw ContractViolation(c.id + ": " + e.what());
      }
    }
  }
}

SystemModel make_model(const std::string& id) {
  if (id == "unicycle") return make_unicycle();
  throw ContractViolation("model: unknown model '" + id + "'");
}

std::vector<BarrierChain> build_chains(const ScenarioConfig& config, const SystemModel& model) {
  std::vector<BarrierChain> chains;
  chains.reserve(config.chains.size());
  for (const auto& c : config.chains) {
    if (c.tag == ChainTag::kSafety) {
      chains.push_back(make_circular_safety(c.id, model, c.center, c.radius, c.alphas, c.norm_order, c.form));
    } else {
      chains.push_back(make_reach_remain(c.id, model, c.reach, c.alphas));
    }
  }
  return chains;
}

std::vector<Eigen::VectorXd> integrate_zoh(const SystemModel& model, const Eigen::VectorXd& input,
                                           const Eigen::VectorXd& state, const std::vector<double>& times,
                                           double tolerance) {
  if (times.empty()) throw ContractViolation("integrate_zoh: no output times");
  if (input.size() != model.input_dim || state.size() != model.state_dim)
    throw ContractViolation("integrate_zoh: dimension mismatch");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw ContractViolation("integrate_zoh: times must be strictly increasing");

  auto rhs = [&](const OdeState& x, OdeState& dxdt, double t) {
    const Eigen::VectorXd f = eval_field(model, to_eigen(x), input, t);
    dxdt.assign(f.data(), f.data() + f.size());
  };
  std::vector<Eigen::VectorXd> out;
  out.reserve(times.size());
  auto observer = [&](const OdeState& x, double) {
    Eigen::VectorXd v = to_eigen(x);
    if (!v.allFinite()) throw SimulationAbort("integrate_zoh: non-finite state");
    out.push_back(std::move(v));
  };
  OdeState x(state.data(), state.data() + state.size());
  if (times.size() == 1) {
    observer(x, times[0]);
    return out;
  }
  const double span = times.back() - times.front();
  auto stepper = odeint::make_dense_output(tolerance, tolerance, odeint::runge_kutta_dopri5<OdeState>());
  try {
    odeint::integrate_times(stepper, rhs, x, times.begin(), times.end(), span / 100.0, observer,
                            odeint::max_step_checker(100000));
  } catch (const odeint::step_adjustment_error& e) {
    throw SimulationAbort(std::string("integrate_zoh: step size underflow: ") + e.what());
  } catch (const odeint::no_progress_error& e) {
    throw SimulationAbort(std::string("integrate_zoh: no progress: ") + e.what());
  } catch (const odeint::odeint_error& e) {
    throw SimulationAbort(std::string("integrate_zoh: ") + e.what());
  }
  return out;
}

Eigen::VectorXd step_zoh(const SystemModel& model, const Eigen::VectorXd& input, const Eigen::VectorXd& state,
                         double t_k, double dt, double tolerance) {
  if (!(dt > 0.0)) throw ContractViolation("step_zoh: dt must be > 0");
  return integrate_zoh(model, input, state, {t_k, t_k + dt}, tolerance).back();
}

TraceLog run_scenario(const ScenarioConfig& config) {
  config.validate();
  const SystemModel model = make_model(config.model);
  const std::vector<BarrierChain> chains = build_chains(config, model);
  const int steps = config.step_count();
  const double dt = config.dt;
  const double substep = config.effective_substep();
  const int q = model.input_dim;

  for (const auto& chain : chains) {
    if (!step_active(chain, config.t0, dt)) continue;
    const auto levels = chain.psi_levels(config.initial_state, config.t0, chain.piece_at(config.t0));
    for (std::size_t i = 0; i < levels.size(); ++i) {
      if (!(levels[i] >= 0.0)) {
        throw ContractViolation("initial state violates level " + std::to_string(i) + " of chain '" + chain.id() +
                                "' (psi = " + format_number(levels[i]) + ")");
      }
    }
  }

  TraceLog trace;
  trace.scenario = config.name;
  trace.controller = config.controller;
  trace.state_names = model.state_names;
  trace.input_dim = q;
  trace.dt = dt;
  trace.substep = substep;
  for (const auto& chain : chains) {
    trace.chain_ids.push_back(chain.id());
    trace.chain_levels.push_back(chain.relative_degree());
  }

  BoundEstimator estimator(model, config.input_box, config.bound);
  const bool sampled = config.controller != ControllerKind::kHocbf;
  const bool relaxed = config.controller == ControllerKind::kRelaxedSacbf;
  const bool applied_mode = config.bound.candidates == CandidateInputs::kAppliedInput;

  Eigen::VectorXd x = config.initial_state;
  Eigen::VectorXd previous_input = Eigen::VectorXd::Zero(q);
  Eigen::VectorXd last_optimal = Eigen::VectorXd::Zero(q);

  for (int k = 0; k < steps; ++k) {
    const double t_k = config.t0 + k * dt;
    StepRecord step;
    step.index = static_cast<std::size_t>(k);
    step.t = t_k;
    step.state = x;

    bool set_exit = false;
    std::vector<std::size_t> live;
    for (std::size_t c = 0; c < chains.size(); ++c) {
      ChainStepRecord rec;
      rec.chain_id = chains[c].id();
      rec.active = step_active(chains[c], t_k, dt);
      if (rec.active) {
        rec.piece = chains[c].piece_at(t_k);
        try {
          rec.psi = chains[c].psi_levels(x, t_k, rec.piece);
          live.push_back(c);
        } catch (const DomainError& e) {
          set_exit = true;
          step.note += rec.chain_id + ": " + e.what() + "; ";
        }
      }
      step.chains.push_back(std::move(rec));
    }

    // Bounds used in the rows. With applied-input candidates they start at
    // the held input and are raised until they cover the QP's own input.
    const Eigen::VectorXd held = config.input_box.clamp(previous_input);
    std::vector<BoundEstimate> used(chains.size());
    std::vector<BoundEstimate> at_input(chains.size());
    if (sampled) {
      for (std::size_t c : live) used[c] = estimator.estimate(chains[c], x, t_k, dt, held);
    }

    std::vector<SacbfRow> rows;
    std::vector<double> weights;
    std::vector<std::size_t> row_chain;
    std::vector<double> omegas;
    Eigen::VectorXd u;
    bool optimal = false;
    const int rounds = sampled && applied_mode ? std::max(1, config.bound.certify_iterations) : 1;
    for (int round = 0; round < rounds && !set_exit; ++round) {
      rows.clear();
      weights.clear();
      row_chain.clear();
      for (std::size_t c : live) {
        try {
          rows.push_back(sampled ? sacbf_row(chains[c], x, t_k, dt, used[c].m_bar, relaxed)
                                 : hocbf_row(chains[c], x, t_k));
        } catch (const SetExitError& e) {
          set_exit = true;
          step.note += std::string(e.what()) + "; ";
          continue;
        }
        row_chain.push_back(c);
        if (rows.back().relaxed) weights.push_back(config.chains[c].weight);
      }
      if (set_exit) break;
      const QpSolution sol = solve_qp(build_qp(rows, config.input_box, weights));
      if (sol.status != QpStatus::kOptimal) {
        step.note += "qp infeasible; ";
        break;
      }
      u = config.input_box.clamp(sol.z.head(q));
      omegas.assign(rows.size(), 1.0);
      Eigen::Index w = q;
      for (std::size_t r = 0; r < rows.size(); ++r)
        if (rows[r].relaxed) omegas[r] = std::clamp(sol.z(w++), 0.0, 1.0);
      if (!(sampled && applied_mode)) {
        optimal = true;
        break;
      }
      bool covered = true;
      for (std::size_t c : live) {
        at_input[c] = estimator.estimate(chains[c], x, t_k, dt, u);
        if (at_input[c].m_bar > used[c].m_bar) {
          used[c] = at_input[c];
          used[c].correction += config.bound.certify_margin * used[c].m_bar;
          used[c].m_bar *= 1.0 + config.bound.certify_margin;
          covered = false;
        }
      }
      if (covered) {
        optimal = true;
      } else if (round + 1 == rounds) {
        step.note += "bound not certified for the solved input; ";
      }
      if (optimal) break;
    }

    if (optimal) {
      step.status = StepStatus::kOptimal;
      last_optimal = u;
    } else {
      step.status = set_exit ? StepStatus::kSetExit : StepStatus::kInfeasible;
      u = config.policy == InfeasibilityPolicy::kHoldPrevious ? config.input_box.clamp(last_optimal)
                                                                : config.input_box.clamp(Eigen::VectorXd::Zero(q));
      omegas.assign(rows.size(), 1.0);
    }
    step.input = u;

    if (sampled) {
      for (std::size_t c : live) {
        ChainStepRecord& rec = step.chains[c];
        // The recorded bound and tube always refer to the applied input.
        if (applied_mode && !optimal) at_input[c] = estimator.estimate(chains[c], x, t_k, dt, u);
        const BoundEstimate& ref = applied_mode ? (optimal ? used[c] : at_input[c]) : used[c];
        rec.has_bound = true;
        rec.m_bar = ref.m_bar;
        rec.m_hat = ref.m_hat;
        rec.correction = ref.correction;
        rec.tube_radius = applied_mode ? at_input[c].tube_radius : used[c].tube_radius;
      }
    }
    for (std::size_t r = 0; r < rows.size(); ++r) {
      ChainStepRecord& rec = step.chains[row_chain[r]];
      rec.row = rows[r];
      rec.has_row = true;
      rec.comparison_bound = rows[r].comparison_bound;
      rec.omega = omegas[r];
      rec.slack = rows[r].lhs(u, omegas[r]) - rows[r].rhs;
    }

    const std::vector<double> times = dense_times(t_k, dt, substep);
    const std::vector<Eigen::VectorXd> states = integrate_zoh(model, u, x, times, config.integrator_tolerance);
    for (std::size_t j = 0; j < times.size(); ++j) {
      trace.dense.push_back({step.index, times[j], states[j]});
      for (std::size_t c = 0; c < chains.size(); ++c) {
        const ChainStepRecord& rec = step.chains[c];
        if (!rec.active) continue;
        AuditSample sample;
        sample.t = times[j];
        sample.chain_id = chains[c].id();
        const int top = chains[c].relative_degree() - 1;
        try {
          sample.psi0 = chains[c].psi(0, states[j], times[j], rec.piece);
          sample.psi_top = chains[c].psi(top, states[j], times[j], rec.piece);
        } catch (const DomainError&) {
          sample.psi_top = kNaN;
        }
        trace.audit.push_back(std::move(sample));
      }
    }
    x = states.back();
    previous_input = u;
    trace.steps.push_back(std::move(step));
  }
  trace.final_state = x;
  trace.final_time = config.t0 + steps * dt;
  return trace;
}

AuditReport audit_invariance(const TraceLog& trace, const std::vector<BarrierChain>& chains, double tolerance) {
  AuditReport report;
  std::size_t cursor = 0;
  for (const StepRecord& step : trace.steps) {
    std::vector<const DenseState*> dense;
    while (cursor < trace.dense.size() && trace.dense[cursor].step < step.index) ++cursor;
    while (cursor < trace.dense.size() && trace.dense[cursor].step == step.index) dense.push_back(&trace.dense[cursor++]);
    if (dense.size() < 2) continue;
    const bool certified = step.status == StepStatus::kOptimal && trace.controller != ControllerKind::kHocbf;
    if (certified) ++report.steps_checked;

    for (std::size_t c = 0; c < step.chains.size() && c < chains.size(); ++c) {
      const ChainStepRecord& rec = step.chains[c];
      if (!rec.active || !rec.has_row) continue;
      const BarrierChain& chain = chains[c];
      std::vector<double> psi(dense.size());
      std::vector<double> psi_dot(dense.size());
      for (std::size_t j = 0; j < dense.size(); ++j) {
        const TopDerivatives d = chain.top(dense[j]->state, dense[j]->t, rec.piece);
        psi[j] = d.value;
        const Eigen::VectorXd F = eval_field(chain.model(), dense[j]->state, step.input, dense[j]->t);
        psi_dot[j] = d.grad_x.dot(F) + d.dt;
      }

      if (rec.has_bound) {
        ++report.dominance_checked;
        double max_dd = 0.0;
        const std::size_t n = dense.size();
        for (std::size_t j = 0; j < n; ++j) {
          double dd = 0.0;
          if (j == 0) {
            dd = (psi_dot[1] - psi_dot[0]) / (dense[1]->t - dense[0]->t);
          } else if (j + 1 == n) {
            dd = (psi_dot[n - 1] - psi_dot[n - 2]) / (dense[n - 1]->t - dense[n - 2]->t);
          } else {
            dd = (psi_dot[j + 1] - psi_dot[j - 1]) / (dense[j + 1]->t - dense[j - 1]->t);
          }
          max_dd = std::max(max_dd, std::abs(dd));
        }
        if (max_dd > rec.m_bar) ++report.dominance_violations;
        if (rec.m_bar > 0.0) report.worst_dominance_ratio = std::max(report.worst_dominance_ratio, max_dd / rec.m_bar);
        for (const DenseState* ds : dense) {
          if ((ds->state - step.state).norm() > rec.tube_radius * (1.0 + 1e-12) + 1e-12) {
            ++report.tube_violations;
            break;
          }
        }
      }

      if (!certified) continue;
      const double t_k = step.t;
      const double rate = rec.row.drift_rate + rec.row.u_coeffs.dot(step.input);
      const double psi_k = rec.row.psi_top;
      for (std::size_t j = 0; j < dense.size(); ++j) {
        const double tau = dense[j]->t - t_k;
        if (psi[j] < -tolerance) report.violations.push_back({step.index, rec.chain_id, tau, "dense", -psi[j]});
        const double l = psi_k + tau * rate - 0.5 * rec.m_bar * tau * tau;
        if (l < -tolerance) report.violations.push_back({step.index, rec.chain_id, tau, "quadratic", -l});
        if (psi[j] < l - tolerance)
          report.violations.push_back({step.index, rec.chain_id, tau, "taylor", l - psi[j]});
      }
      const double end_bound = rec.omega * rec.comparison_bound;
      if (psi.back() < end_bound - tolerance)
        report.violations.push_back({step.index, rec.chain_id, dense.back()->t - t_k, "endpoint", end_bound - psi.back()});
    }
  }
  return report;
}

RunSummary summarize(const ScenarioConfig& config, const TraceLog& trace, const AuditReport& audit,
                     double tolerance) {
  RunSummary s;
  s.steps = trace.steps.size();
  for (const auto& step : trace.steps) {
    if (step.status == StepStatus::kInfeasible) ++s.infeasible_steps;
    if (step.status == StepStatus::kSetExit) ++s.set_exit_steps;
  }
  for (const auto& id : trace.chain_ids) {
    s.min_psi0[id] = std::numeric_limits<double>::infinity();
    s.min_psi_top[id] = std::numeric_limits<double>::infinity();
  }
  for (const auto& a : trace.audit) {
    s.min_psi0[a.chain_id] = std::min(s.min_psi0[a.chain_id], a.psi0);
    if (std::isnan(a.psi_top)) {
      s.min_psi_top[a.chain_id] = kNaN;
    } else if (!std::isnan(s.min_psi_top[a.chain_id])) {
      s.min_psi_top[a.chain_id] = std::min(s.min_psi_top[a.chain_id], a.psi_top);
    }
    if (a.psi0 < -tolerance && !s.first_violation_time) s.first_violation_time = a.t;
  }
  for (const auto& c : config.chains) {
    if (c.tag != ChainTag::kReach) continue;
    std::optional<double> reached;
    const TimeWindow w = c.reach.window();
    for (const auto& ds : trace.dense) {
      if (!w.contains(ds.t)) continue;
      double dist = 0.0;
      for (std::size_t i = 0; i < c.reach.position_indices.size(); ++i) {
        const double d = ds.state(c.reach.position_indices[i]) - c.reach.center(static_cast<Eigen::Index>(i));
        dist += std::pow(std::abs(d), c.reach.norm_order);
      }
      dist = std::pow(dist, 1.0 / c.reach.norm_order);
      if (dist <= c.reach.eps_d + 1e-6) {
        reached = ds.t;
        break;
      }
    }
    s.reach_time[c.id] = reached;
  }
  s.audit_violations = audit.violations.size();
  s.dominance_violations = audit.dominance_violations;
  s.tube_violations = audit.tube_violations;
  s.worst_dominance_ratio = audit.worst_dominance_ratio;
  return s;
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

void write_trace_csv(std::ostream& out, const TraceLog& trace) {
  out << "t";
  for (const auto& n : trace.state_names) out << ',' << n;
  for (int i = 0; i < trace.input_dim; ++i) out << ",u" << i;
  out << ",status";
  for (std::size_t c = 0; c < trace.chain_ids.size(); ++c) {
    const std::string& id = trace.chain_ids[c];
    for (int l = 0; l < trace.chain_levels[c]; ++l) out << ',' << id << ".psi" << l;
    out << ',' << id << ".L," << id << ".mbar," << id << ".omega," << id << ".slack," << id << ".m_hat," << id
        << ".correction";
  }
  out << '\n';
  for (const auto& step : trace.steps) {
    out << format_number(step.t);
    for (Eigen::Index i = 0; i < step.state.size(); ++i) out << ',' << format_number(step.state(i));
    for (Eigen::Index i = 0; i < step.input.size(); ++i) out << ',' << format_number(step.input(i));
    out << ',' << to_string(step.status);
    for (std::size_t c = 0; c < trace.chain_ids.size(); ++c) {
      const ChainStepRecord& rec = step.chains[c];
      for (int l = 0; l < trace.chain_levels[c]; ++l) {
        const bool has = rec.active && static_cast<std::size_t>(l) < rec.psi.size();
        out << ',' << format_number(has ? rec.psi[static_cast<std::size_t>(l)] : kNaN);
      }
      const bool bound = rec.active && rec.has_bound;
      const bool row = rec.active && rec.has_row;
      out << ',' << format_number(bound && row ? rec.comparison_bound : kNaN) << ','
          << format_number(bound ? rec.m_bar : kNaN) << ',' << format_number(row ? rec.omega : kNaN) << ','
          << format_number(row ? rec.slack : kNaN) << ',' << format_number(bound ? rec.m_hat : kNaN) << ','
          << format_number(bound ? rec.correction : kNaN);
    }
    out << '\n';
  }
}

void write_audit_csv(std::ostream& out, const TraceLog& trace) {
  out << "t,chain_id,psi_top,psi0\n";
  for (const auto& a : trace.audit)
    out << format_number(a.t) << ',' << a.chain_id << ',' << format_number(a.psi_top) << ',' << format_number(a.psi0)
        << '\n';
}

void write_summary(std::ostream& out, const ScenarioConfig& config, const RunSummary& s) {
  out << "scenario = " << config.name << '\n';
  out << "controller = " << to_string(config.controller) << '\n';
  out << "initial_state =";
  for (Eigen::Index i = 0; i < config.initial_state.size(); ++i) out << ' ' << format_number(config.initial_state(i));
  out << '\n';
  out << "steps = " << s.steps << '\n';
  out << "infeasible_steps = " << s.infeasible_steps + s.set_exit_steps << '\n';
  out << "set_exit_steps = " << s.set_exit_steps << '\n';
  out << "first_violation_time = " << (s.first_violation_time ? format_number(*s.first_violation_time) : "none")
      << '\n';
  for (const auto& [id, v] : s.min_psi0) out << "min_psi0." << id << " = " << format_number(v) << '\n';
  for (const auto& [id, v] : s.min_psi_top) out << "min_psi_top." << id << " = " << format_number(v) << '\n';
  for (const auto& [id, v] : s.reach_time)
    out << "reach_time." << id << " = " << (v ? format_number(*v) : "none") << '\n';
  out << "audit_violations = " << s.audit_violations << '\n';
  out << "mbar_dominance_violations = " << s.dominance_violations << '\n';
  out << "tube_violations = " << s.tube_violations << '\n';
  out << "worst_dominance_ratio = " << format_number(s.worst_dominance_ratio) << '\n';
}

void write_figure_csv(std::ostream& out, const TraceLog& trace, const std::vector<BarrierChain>& chains,
                      std::size_t chain_index) {
  const BarrierChain& chain = chains.at(chain_index);
  out << "t";
  for (int l = 0; l < chain.relative_degree(); ++l) out << ",psi" << l;
  out << '\n';
  for (const auto& ds : trace.dense) {
    const ChainStepRecord& rec = trace.steps.at(ds.step).chains.at(chain_index);
    out << format_number(ds.t);
    std::vector<double> levels(static_cast<std::size_t>(chain.relative_degree()), kNaN);
    if (rec.active) {
      try {
        levels = chain.psi_levels(ds.state, ds.t, rec.piece);
      } catch (const DomainError&) {
      }
    }
    for (double v : levels) out << ',' << format_number(v);
    out << '\n';
  }
}

void write_trajectory_csv(std::ostream& out, const TraceLog& trace) {
  out << "t";
  for (const auto& n : trace.state_names) out << ',' << n;
  out << '\n';
  for (const auto& ds : trace.dense) {
    out << format_number(ds.t);
    for (Eigen::Index i = 0; i < ds.state.size(); ++i) out << ',' << format_number(ds.state(i));
    out << '\n';
  }
}

}  // namespace sacbf
