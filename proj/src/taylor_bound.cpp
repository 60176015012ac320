#include "sacbf/taylor_bound.hpp"

#include "sacbf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <utility>

namespace sacbf {
namespace {

double spectral_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() == m.cols() && m.isApprox(m.transpose(), 1e-12)) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

Eigen::VectorXd rk4_step(const SystemModel& model, const Eigen::VectorXd& x, const Eigen::VectorXd& u, double t,
                         double h) {
  const Eigen::VectorXd k1 = eval_field(model, x, u, t);
  const Eigen::VectorXd k2 = eval_field(model, x + 0.5 * h * k1, u, t + 0.5 * h);
  const Eigen::VectorXd k3 = eval_field(model, x + 0.5 * h * k2, u, t + 0.5 * h);
  const Eigen::VectorXd k4 = eval_field(model, x + h * k3, u, t + h);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

SampleBox ball_box(const Eigen::VectorXd& center, double radius) {
  const Eigen::VectorXd r = Eigen::VectorXd::Constant(center.size(), radius);
  return {center - r, center + r};
}

}  // namespace

PhiTerms phi_terms(const SystemModel& model, const BarrierChain& chain, const Eigen::VectorXd& state,
                   const Eigen::VectorXd& input, double t, std::size_t piece) {
  const TopDerivatives d = chain.top(state, t, piece);
  const double field = eval_field(model, state, input, t).norm();
  const double grad = d.grad_x.norm();
  const double u_norm = input.norm();

  double gx_norm_sq = 0.0;
  for (const auto& slice : model.actuation_jac_x(state, t)) {
    const double s = spectral_norm(slice);
    gx_norm_sq += s * s;
  }

  PhiTerms terms;
  terms.hessian = spectral_norm(d.hess_xx) * field * field;
  terms.jacobian = grad * (spectral_norm(model.drift_jac_x(state, t)) + std::sqrt(gx_norm_sq) * u_norm) * field;
  terms.mixed = 2.0 * d.hess_xt.norm() * field;
  terms.time = std::abs(d.dtt);
  terms.time_field = grad * (model.drift_dt(state, t).norm() + spectral_norm(model.actuation_dt(state, t)) * u_norm);
  return terms;
}

double phi(const SystemModel& model, const BarrierChain& chain, const Eigen::VectorXd& state,
           const Eigen::VectorXd& input, double t) {
  return phi_terms(model, chain, state, input, t, chain.piece_at(t)).total();
}

double tube_radius_for_speed(double field_norm, double dt, double lipschitz_F) {
  if (!(dt > 0.0) || !(lipschitz_F >= 0.0)) throw ContractViolation("tube radius: need dt > 0 and L_F >= 0");
  if (lipschitz_F == 0.0) return dt * field_norm;
  return std::expm1(lipschitz_F * dt) / lipschitz_F * field_norm;
}

double tube_radius(const SystemModel& model, const Eigen::VectorXd& state, const Eigen::VectorXd& input, double dt,
                   double lipschitz_F, double t) {
  return tube_radius_for_speed(eval_field(model, state, input, t).norm(), dt, lipschitz_F);
}

double estimate_lipschitz(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& fn, const SampleBox& box,
                          int samples, std::uint64_t seed, double safety_factor) {
  if (samples < 2) throw ContractViolation("estimate_lipschitz: need at least 2 samples");
  if (box.lower.size() != box.upper.size()) throw ContractViolation("estimate_lipschitz: box dimensions differ");
  const Eigen::VectorXd width = box.upper - box.lower;
  if ((width.array() < 0.0).any()) throw ContractViolation("estimate_lipschitz: inverted box");
  if (!(width.array() > 0.0).any()) return 0.0;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  double best = 0.0;
  for (int s = 0; s < samples; ++s) {
    Eigen::VectorXd a(width.size());
    Eigen::VectorXd b(width.size());
    for (Eigen::Index i = 0; i < width.size(); ++i) {
      a(i) = box.lower(i) + unit(rng) * width(i);
      b(i) = std::clamp(a(i) + 0.05 * width(i) * sym(rng), box.lower(i), box.upper(i));
    }
    const double gap = (a - b).norm();
    if (gap < 1e-14) continue;
    const Eigen::VectorXd fa = fn(a);
    const Eigen::VectorXd fb = fn(b);
    if (!fa.allFinite() || !fb.allFinite()) continue;
    best = std::max(best, (fa - fb).norm() / gap);
  }
  return safety_factor * best;
}

std::vector<double> gauss_legendre_nodes(int r) {
  if (r < 1) throw ContractViolation("gauss_legendre_nodes: need r >= 1");
  std::vector<double> nodes;
  nodes.reserve(static_cast<std::size_t>(r));
  for (int i = 1; i <= r; ++i) {
    double x = std::cos(std::numbers::pi * (i - 0.25) / (r + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      // Legendre recurrence for P_r(x) and P_{r-1}(x).
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= r; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      const double dp = r * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / dp;
      x -= step;
      if (std::abs(step) < 1e-16) break;
    }
    nodes.push_back(0.5 * (x + 1.0));
  }
  std::sort(nodes.begin(), nodes.end());
  return nodes;
}

BoundEstimate estimate_mbar(const SystemModel& model, const BarrierChain& chain, const Eigen::VectorXd& state,
                            double t_k, double dt, const InputBox& input_set, const Eigen::VectorXd& previous_input,
                            const BoundSettings& settings, std::optional<LipschitzCacheEntry>* cache) {
  if (settings.nodes < 3 || settings.nodes > 7) throw ContractViolation("estimate_mbar: node count must be in [3, 7]");
  if (!(dt > 0.0)) throw ContractViolation("estimate_mbar: dt must be > 0");
  if (previous_input.size() != model.input_dim || input_set.dim() != model.input_dim)
    throw ContractViolation("estimate_mbar: input dimension mismatch");

  const std::size_t piece = chain.piece_at(t_k);
  const Eigen::VectorXd held = input_set.clamp(previous_input);
  const bool applied = settings.candidates == CandidateInputs::kAppliedInput;
  std::vector<Eigen::VectorXd> candidates;
  if (!applied) candidates = input_set.vertices();
  candidates.push_back(held);
  if (applied) cache = nullptr;

  double speed = 0.0;
  for (const auto& u : candidates) speed = std::max(speed, eval_field(model, state, u, t_k).norm());

  const double t_mid = t_k + 0.5 * dt;
  const int n = model.state_dim;
  const int q = model.input_dim;

  BoundEstimate est;
  const bool reuse = cache != nullptr && cache->has_value() && (*cache)->piece == piece &&
                     (state - (*cache)->anchor).norm() <= settings.cache_fraction * (*cache)->tube_radius;
  if (reuse) {
    est.lipschitz_F = (*cache)->lipschitz_F;
    est.lipschitz_phi = (*cache)->lipschitz_phi;
    est.tube_radius = tube_radius_for_speed(speed, dt, est.lipschitz_F);
  } else {
    auto lipschitz_field = [&](double radius) {
      double lf = 0.0;
      for (const auto& u : candidates) {
        auto fn = [&](const Eigen::VectorXd& x) { return eval_field(model, x, u, t_mid); };
        lf = std::max(lf, estimate_lipschitz(fn, ball_box(state, radius), settings.lipschitz_samples, settings.seed,
                                             settings.safety_factor));
      }
      return lf;
    };
    const double guess = dt * speed * std::numbers::e;
    est.lipschitz_F = lipschitz_field(guess);
    est.tube_radius = tube_radius_for_speed(speed, dt, est.lipschitz_F);
    if (est.tube_radius > guess) {
      est.lipschitz_F = lipschitz_field(est.tube_radius);
      est.tube_radius = tube_radius_for_speed(speed, dt, est.lipschitz_F);
    }

    SampleBox joint;
    const SampleBox xb = ball_box(state, est.tube_radius);
    joint.lower.resize(n + q);
    joint.upper.resize(n + q);
    joint.lower << xb.lower, (applied ? held : input_set.lower);
    joint.upper << xb.upper, (applied ? held : input_set.upper);
    auto phi_fn = [&](const Eigen::VectorXd& z) {
      Eigen::VectorXd out(1);
      try {
        out(0) = phi_terms(model, chain, z.head(n), z.tail(q), t_mid, piece).total();
      } catch (const DomainError&) {
        out(0) = std::numeric_limits<double>::quiet_NaN();
      }
      return out;
    };
    est.lipschitz_phi = estimate_lipschitz(phi_fn, joint, settings.lipschitz_samples, settings.seed + 1,
                                           settings.safety_factor);
    if (cache != nullptr) {
      *cache = LipschitzCacheEntry{state, piece, est.tube_radius, est.lipschitz_F, est.lipschitz_phi};
    }
  }

  // Node states: one RK4 pass under the held input, node to node.
  const std::vector<double> gammas = gauss_legendre_nodes(settings.nodes);
  Eigen::VectorXd x = state;
  double t = t_k;
  for (double g : gammas) {
    const double t_node = t_k + g * dt;
    x = rk4_step(model, x, held, t, t_node - t);
    t = t_node;
    for (const auto& u : candidates) {
      const double value = phi_terms(model, chain, x, u, t_node, piece).total();
      est.node_records.push_back({t_node, x, u, value});
      est.m_hat = std::max(est.m_hat, value);
    }
  }
  est.nodes_used = settings.nodes;

  est.delta_x = 0.5 * est.tube_radius;
  if (settings.input_variation == InputVariation::kCandidateSpread) {
    double spread = 0.0;
    for (std::size_t i = 0; i < candidates.size(); ++i)
      for (std::size_t j = i + 1; j < candidates.size(); ++j)
        spread = std::max(spread, (candidates[i] - candidates[j]).norm());
    est.delta_u = 0.5 * spread;
  }
  est.correction = est.lipschitz_phi * (est.delta_x + est.delta_u);
  est.m_bar = est.m_hat + est.correction;
  return est;
}

BoundEstimator::BoundEstimator(SystemModel model, InputBox input_set, BoundSettings settings)
    : model_(std::move(model)), input_set_(std::move(input_set)), settings_(settings) {}

BoundEstimate BoundEstimator::estimate(const BarrierChain& chain, const Eigen::VectorXd& state, double t_k, double dt,
                                       const Eigen::VectorXd& previous_input) {
  auto& entry = cache_[chain.id()];
  return estimate_mbar(model_, chain, state, t_k, dt, input_set_, previous_input, settings_, &entry);
}

}  // namespace sacbf
