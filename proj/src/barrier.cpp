#include "sacbf/barrier.hpp"

#include "sacbf/errors.hpp"

#include <cmath>
#include <random>
#include <string>
#include <utility>

namespace sacbf {
namespace {

constexpr double kWindowTol = 1e-9;

// |d|^p
Jet abs_pow(const Jet& d, double p) {
  if (p == 2.0) return d * d;
  return pow(abs(d), p);
}

// sign(d) |d|^p
Jet signed_abs_pow(const Jet& d, double p) {
  if (p == 1.0) return d;
  const Jet m = pow(abs(d), p);
  return d.value < 0.0 ? -m : m;
}

JetVector offsets(const JetVector& x, const Eigen::VectorXd& center, const std::vector<int>& idx) {
  JetVector d;
  d.reserve(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) d.push_back(x.at(static_cast<std::size_t>(idx[i])) - center(static_cast<Eigen::Index>(i)));
  return d;
}

Jet powered_sum(const JetVector& d, double p) {
  Jet s = abs_pow(d[0], p);
  for (std::size_t i = 1; i < d.size(); ++i) s = s + abs_pow(d[i], p);
  return s;
}

// Gradient of sum |d_i|^p (kPowered) or of ||d||_p (kLiteral) with respect to
// the full state, scattered into the position slots.
JetVector distance_gradient(const JetVector& x, const JetVector& d, double p, NormForm form,
                            const std::vector<int>& idx, Eigen::Index dim) {
  JetVector g(x.size(), Jet(0.0, dim));
  if (form == NormForm::kPowered) {
    for (std::size_t i = 0; i < idx.size(); ++i) {
      g[static_cast<std::size_t>(idx[i])] = (p == 2.0) ? 2.0 * d[i] : p * signed_abs_pow(d[i], p - 1.0);
    }
  } else {
    const Jet norm = pow(powered_sum(d, p), 1.0 / p);
    const Jet scale = pow(norm, 1.0 - p);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      g[static_cast<std::size_t>(idx[i])] = signed_abs_pow(d[i], p - 1.0) * scale;
    }
  }
  return g;
}

Jet distance_term(const JetVector& d, double p, NormForm form) {
  const Jet s = powered_sum(d, p);
  return form == NormForm::kPowered ? s : pow(s, 1.0 / p);
}

void check_positions(const std::vector<int>& idx, Eigen::Index center_dim, const char* who) {
  if (idx.empty() || static_cast<Eigen::Index>(idx.size()) != center_dim)
    throw ContractViolation(std::string(who) + ": position indices must match the center dimension");
  for (int i : idx)
    if (i < 0) throw ContractViolation(std::string(who) + ": negative position index");
}

}  // namespace

ClassKappaPower::ClassKappaPower(double lambda_in, double eta_in) : lambda(lambda_in), eta(eta_in) {
  if (!(lambda > 0.0) || !(eta > 0.0)) throw ContractViolation("class-kappa power: lambda and eta must be > 0");
}

bool ClassKappaPower::integer_exponent() const { return eta == std::round(eta); }

double ClassKappaPower::operator()(double s) const {
  if (s < 0.0 && !integer_exponent())
    throw DomainError("class-kappa power: fractional exponent of negative barrier value " + std::to_string(s));
  return lambda * std::pow(s, eta);
}

Jet ClassKappaPower::operator()(const Jet& s) const {
  if (s.value < 0.0 && !integer_exponent())
    throw DomainError("class-kappa power: fractional exponent of negative barrier value " + std::to_string(s.value));
  return lambda * pow(s, eta);
}

void ReachSpec::validate() const {
  if (!(eps0 >= eps_d) || !(eps_d >= 0.0)) throw ContractViolation("reach spec: need eps0 >= eps_d >= 0");
  if (!(t_start < t_reach)) throw ContractViolation("reach spec: need t_start < t_reach");
  if (t_remain && !(t_reach <= *t_remain)) throw ContractViolation("reach spec: need t_reach <= t_remain");
  if (!(norm_order >= 1.0)) throw ContractViolation("reach spec: norm order must be >= 1");
  check_positions(position_indices, center.size(), "reach spec");
}

double ReachSpec::contraction_rate() const {
  const double span = t_reach - t_start;
  if (schedule == ReachSchedule::kLinearRadius) return (eps0 - eps_d) / span;
  return (std::pow(eps0, norm_order) - std::pow(eps_d, norm_order)) / span;
}

CircularSafetyBarrier::CircularSafetyBarrier(Eigen::VectorXd center, double radius, double norm_order, NormForm form,
                                             std::vector<int> position_indices)
    : center_(std::move(center)), radius_(radius), p_(norm_order), form_(form), idx_(std::move(position_indices)) {
  if (!(radius_ > 0.0)) throw ContractViolation("circular safety barrier: radius must be > 0");
  if (!(p_ >= 1.0)) throw ContractViolation("circular safety barrier: norm order must be >= 1");
  check_positions(idx_, center_.size(), "circular safety barrier");
}

Jet CircularSafetyBarrier::value(const JetVector& x, const Jet&, std::size_t) const {
  return distance_term(offsets(x, center_, idx_), p_, form_) - std::pow(radius_, p_);
}

JetVector CircularSafetyBarrier::grad_x(const JetVector& x, const Jet& t, std::size_t) const {
  return distance_gradient(x, offsets(x, center_, idx_), p_, form_, idx_, t.dim());
}

Jet CircularSafetyBarrier::partial_t(const JetVector&, const Jet& t, std::size_t) const { return Jet(0.0, t.dim()); }

ReachRemainBarrier::ReachRemainBarrier(ReachSpec spec) : spec_(std::move(spec)) { spec_.validate(); }

std::size_t ReachRemainBarrier::piece_at(double t) const {
  return (spec_.t_remain && t >= spec_.t_reach) ? 1 : 0;
}

Jet ReachRemainBarrier::radius_term(const Jet& t, std::size_t piece) const {
  const double p = spec_.norm_order;
  if (piece == 1) return Jet(std::pow(spec_.eps_d, p), t.dim());
  const double k = spec_.contraction_rate();
  if (spec_.schedule == ReachSchedule::kLinearRadius) {
    return pow(spec_.eps0 - k * (t - spec_.t_start), p);
  }
  return std::pow(spec_.eps0, p) - k * (t - spec_.t_start);
}

Jet ReachRemainBarrier::radius_term_dt(const Jet& t, std::size_t piece) const {
  if (piece == 1) return Jet(0.0, t.dim());
  const double k = spec_.contraction_rate();
  if (spec_.schedule == ReachSchedule::kLinearRadius) {
    const double p = spec_.norm_order;
    return -p * k * pow(spec_.eps0 - k * (t - spec_.t_start), p - 1.0);
  }
  return Jet(-k, t.dim());
}

Jet ReachRemainBarrier::value(const JetVector& x, const Jet& t, std::size_t piece) const {
  return radius_term(t, piece) -
         distance_term(offsets(x, spec_.center, spec_.position_indices), spec_.norm_order, spec_.form);
}

JetVector ReachRemainBarrier::grad_x(const JetVector& x, const Jet& t, std::size_t) const {
  JetVector g = distance_gradient(x, offsets(x, spec_.center, spec_.position_indices), spec_.norm_order, spec_.form,
                                  spec_.position_indices, t.dim());
  for (auto& gi : g) gi = -gi;
  return g;
}

Jet ReachRemainBarrier::partial_t(const JetVector&, const Jet& t, std::size_t piece) const {
  return radius_term_dt(t, piece);
}

BarrierChain::BarrierChain(std::string id, ChainTag tag, std::shared_ptr<const BarrierFunction> psi0,
                           std::vector<ClassKappaPower> alphas, SystemModel model)
    : id_(std::move(id)), tag_(tag), psi0_(std::move(psi0)), alphas_(std::move(alphas)), model_(std::move(model)) {
  if (!psi0_) throw ContractViolation("barrier chain '" + id_ + "': missing base barrier");
  const int m = relative_degree();
  if (m < 1 || m > 2) throw ContractViolation("barrier chain '" + id_ + "': relative degree must be 1 or 2");
  if (m == 2 && !model_.drift_jet)
    throw ContractViolation("barrier chain '" + id_ + "': model '" + model_.name + "' provides no drift jets");

  // Relative-degree verification on deterministic random states: the input
  // must not act on psi_0 .. psi_{m-2} and must act on psi_{m-1} somewhere.
  std::mt19937_64 rng(0x5acbfULL);
  std::uniform_real_distribution<double> coord(-5.0, 5.0);
  const TimeWindow w = window();
  const double t_lo = std::isfinite(w.begin) ? w.begin : 0.0;
  const double t_hi = std::isfinite(w.end) ? w.end : t_lo + 10.0;
  std::uniform_real_distribution<double> time(t_lo, t_hi);
  bool top_acts = false;
  for (int trial = 0; trial < 32; ++trial) {
    Eigen::VectorXd x(model_.state_dim);
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = coord(rng);
    const double t = time(rng);
    const std::size_t piece = piece_at(t);
    const Eigen::MatrixXd g = model_.actuation(x, t);
    if (m == 2) {
      Jet tj;
      const JetVector xs = constant_state(x, t, &tj);
      const JetVector grad0 = psi0_->grad_x(xs, tj, piece);
      Eigen::VectorXd gvec(x.size());
      for (Eigen::Index i = 0; i < x.size(); ++i) gvec(i) = grad0[static_cast<std::size_t>(i)].value;
      const double lg0 = (gvec.transpose() * g).norm();
      if (lg0 > 1e-9 * (1.0 + gvec.norm() * g.norm()))
        throw ContractViolation("barrier chain '" + id_ + "': input acts on psi_0, relative degree is not 2");
    }
    try {
      if (top_lie(x, t, piece).lg.norm() > 1e-9) top_acts = true;
    } catch (const DomainError&) {
      // fractional exponent outside the set; sample not informative
    }
  }
  if (!top_acts)
    throw ContractViolation("barrier chain '" + id_ + "': input never acts on psi_" + std::to_string(m - 1));
}

void BarrierChain::check_time(double t) const {
  if (!window().contains(t, kWindowTol))
    throw OutOfWindowError("barrier chain '" + id_ + "' evaluated at t=" + std::to_string(t) + " outside its window");
}

Jet BarrierChain::level_jet(int level, const JetVector& x, const Jet& t, std::size_t piece) const {
  const Jet psi0 = psi0_->value(x, t, piece);
  if (level == 0) return psi0;
  // Level 1: psi_0 differentiated along the drift only, since L_g psi_0 = 0.
  const JetVector f = model_.drift_jet(x, t);
  return dot(psi0_->grad_x(x, t, piece), f) + psi0_->partial_t(x, t, piece) + alphas_[0](psi0);
}

double BarrierChain::psi(int level, const Eigen::VectorXd& x, double t) const { return psi(level, x, t, piece_at(t)); }

double BarrierChain::psi(int level, const Eigen::VectorXd& x, double t, std::size_t piece) const {
  if (level < 0 || level >= relative_degree())
    throw ContractViolation("barrier chain '" + id_ + "': level " + std::to_string(level) + " out of range");
  if (x.size() != model_.state_dim) throw ContractViolation("barrier chain '" + id_ + "': state dimension mismatch");
  check_time(t);
  Jet tj;
  const JetVector xs = constant_state(x, t, &tj);
  return level_jet(level, xs, tj, piece).value;
}

std::vector<double> BarrierChain::psi_levels(const Eigen::VectorXd& x, double t, std::size_t piece) const {
  std::vector<double> out;
  for (int i = 0; i < relative_degree(); ++i) out.push_back(psi(i, x, t, piece));
  return out;
}

TopDerivatives BarrierChain::top(const Eigen::VectorXd& x, double t, std::size_t piece) const {
  if (x.size() != model_.state_dim) throw ContractViolation("barrier chain '" + id_ + "': state dimension mismatch");
  check_time(t);
  Jet tj;
  const JetVector xs = seed_state(x, t, &tj);
  const Jet top = level_jet(relative_degree() - 1, xs, tj, piece);
  const Eigen::Index n = x.size();
  TopDerivatives d;
  d.value = top.value;
  d.grad_x = top.grad.head(n);
  d.dt = top.grad(n);
  d.hess_xx = top.hess.topLeftCorner(n, n);
  d.hess_xt = top.hess.col(n).head(n);
  d.dtt = top.hess(n, n);
  return d;
}

LieDerivatives BarrierChain::top_lie(const Eigen::VectorXd& x, double t, std::size_t piece) const {
  const TopDerivatives d = top(x, t, piece);
  LieDerivatives lie;
  lie.lf = d.grad_x.dot(model_.drift(x, t));
  lie.lg = model_.actuation(x, t).transpose() * d.grad_x;
  lie.dt = d.dt;
  return lie;
}

LieDerivatives top_lie_derivatives(const BarrierChain& chain, const Eigen::VectorXd& x, double t) {
  return chain.top_lie(x, t, chain.piece_at(t));
}

BarrierChain make_circular_safety(std::string id, const SystemModel& model, const Eigen::VectorXd& center,
                                  double radius, std::vector<ClassKappaPower> alphas, double norm_order, NormForm form,
                                  std::vector<int> position_indices) {
  auto base = std::make_shared<CircularSafetyBarrier>(center, radius, norm_order, form, std::move(position_indices));
  return BarrierChain(std::move(id), ChainTag::kSafety, std::move(base), std::move(alphas), model);
}

BarrierChain make_reach_remain(std::string id, const SystemModel& model, const ReachSpec& spec,
                               std::vector<ClassKappaPower> alphas) {
  auto base = std::make_shared<ReachRemainBarrier>(spec);
  return BarrierChain(std::move(id), ChainTag::kReach, std::move(base), std::move(alphas), model);
}

}  // namespace sacbf
