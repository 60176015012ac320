#pragma once

#include "sacbf/dynamics.hpp"
#include "sacbf/jet.hpp"

#include <Eigen/Dense>

#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace sacbf {

/// alpha(s) = lambda * s^eta.
struct ClassKappaPower {
  double lambda = 1.0;
  double eta = 1.0;

  ClassKappaPower() = default;
  ClassKappaPower(double lambda, double eta);

  bool integer_exponent() const;
  /// Throws DomainError for s < 0 when eta is fractional.
  double operator()(double s) const;
  Jet operator()(const Jet& s) const;
};

enum class ChainTag { kSafety, kReach };

/// How a p-norm enters a catalog barrier: ||d||_p^p (kPowered, the quadratic
/// form for p = 2) or ||d||_p itself (kLiteral).
enum class NormForm { kPowered, kLiteral };

/// Radius schedule of a reach barrier on [t_start, t_reach]: eps^p shrinks
/// linearly (kPoweredRadius, the default) or eps shrinks linearly (kLinearRadius).
enum class ReachSchedule { kPoweredRadius, kLinearRadius };

struct TimeWindow {
  double begin = -std::numeric_limits<double>::infinity();
  double end = std::numeric_limits<double>::infinity();

  bool contains(double t, double tol = 1e-9) const { return t >= begin - tol && t <= end + tol; }
};

struct ReachSpec {
  Eigen::VectorXd center;
  double eps0 = 0.0;
  double eps_d = 0.0;
  double t_start = 0.0;
  double t_reach = 0.0;
  std::optional<double> t_remain;
  double norm_order = 2.0;
  ReachSchedule schedule = ReachSchedule::kPoweredRadius;
  NormForm form = NormForm::kPowered;
  std::vector<int> position_indices{0, 1};

  /// Throws ContractViolation unless eps0 >= eps_d >= 0 and t_start < t_reach <= t_remain.
  void validate() const;
  /// Shrink rate of eps^p (kPoweredRadius) or of eps (kLinearRadius).
  double contraction_rate() const;
  TimeWindow window() const { return {t_start, t_remain.value_or(t_reach)}; }
};

/// Zeroth barrier level b(x, t), with its first partial derivatives expressed
/// as jets so that the next recursion level can be differentiated twice.
/// Piecewise-in-time barriers expose piece indices; a sampling interval is
/// evaluated on the piece selected at its left end.
class BarrierFunction {
 public:
  virtual ~BarrierFunction() = default;

  virtual TimeWindow window() const { return {}; }
  virtual std::size_t piece_at(double /*t*/) const { return 0; }
  virtual bool time_varying() const = 0;

  virtual Jet value(const JetVector& x, const Jet& t, std::size_t piece) const = 0;
  virtual JetVector grad_x(const JetVector& x, const Jet& t, std::size_t piece) const = 0;
  virtual Jet partial_t(const JetVector& x, const Jet& t, std::size_t piece) const = 0;
};

/// b(x) = ||pos - center||_p^p - r^p (kPowered) or ||pos - center||_p - r^p (kLiteral).
class CircularSafetyBarrier final : public BarrierFunction {
 public:
  CircularSafetyBarrier(Eigen::VectorXd center, double radius, double norm_order = 2.0,
                        NormForm form = NormForm::kPowered, std::vector<int> position_indices = {0, 1});

  bool time_varying() const override { return false; }
  Jet value(const JetVector& x, const Jet& t, std::size_t piece) const override;
  JetVector grad_x(const JetVector& x, const Jet& t, std::size_t piece) const override;
  Jet partial_t(const JetVector& x, const Jet& t, std::size_t piece) const override;

  const Eigen::VectorXd& center() const { return center_; }
  double radius() const { return radius_; }

 private:
  Eigen::VectorXd center_;
  double radius_;
  double p_;
  NormForm form_;
  std::vector<int> idx_;
};

/// Shrinking-radius reach barrier, eps(t)^p - ||pos - center||_p^p on
/// [t_start, t_reach], followed by an optional constant-radius remain piece
/// on [t_reach, t_remain].
class ReachRemainBarrier final : public BarrierFunction {
 public:
  explicit ReachRemainBarrier(ReachSpec spec);

  TimeWindow window() const override { return spec_.window(); }
  std::size_t piece_at(double t) const override;
  bool time_varying() const override { return true; }
  Jet value(const JetVector& x, const Jet& t, std::size_t piece) const override;
  JetVector grad_x(const JetVector& x, const Jet& t, std::size_t piece) const override;
  Jet partial_t(const JetVector& x, const Jet& t, std::size_t piece) const override;

  const ReachSpec& spec() const { return spec_; }

 private:
  Jet radius_term(const Jet& t, std::size_t piece) const;
  Jet radius_term_dt(const Jet& t, std::size_t piece) const;

  ReachSpec spec_;
};

/// Exact derivatives of the top level psi_{m-1} at one (x, t).
struct TopDerivatives {
  double value = 0.0;
  Eigen::VectorXd grad_x;
  double dt = 0.0;
  Eigen::MatrixXd hess_xx;
  Eigen::VectorXd hess_xt;
  double dtt = 0.0;
};

/// psi_{m-1}' = lf + lg . u + dt for any held input u.
struct LieDerivatives {
  double lf = 0.0;
  Eigen::VectorXd lg;
  double dt = 0.0;
};

/// A barrier b = psi_0 together with class-kappa parameters alpha_1..alpha_m
/// defining psi_i = d/dt psi_{i-1} + alpha_i(psi_{i-1}). Relative degrees 1
/// and 2 are supported; the degree is verified against the paired model at
/// construction.
class BarrierChain {
 public:
  BarrierChain(std::string id, ChainTag tag, std::shared_ptr<const BarrierFunction> psi0,
               std::vector<ClassKappaPower> alphas, SystemModel model);

  const std::string& id() const { return id_; }
  ChainTag tag() const { return tag_; }
  int relative_degree() const { return static_cast<int>(alphas_.size()); }
  const std::vector<ClassKappaPower>& alphas() const { return alphas_; }
  const ClassKappaPower& top_alpha() const { return alphas_.back(); }
  const BarrierFunction& base() const { return *psi0_; }
  const SystemModel& model() const { return model_; }

  TimeWindow window() const { return psi0_->window(); }
  bool active_at(double t) const { return window().contains(t); }
  std::size_t piece_at(double t) const { return psi0_->piece_at(t); }

  /// psi_level(x, t); piece defaults to piece_at(t).
  double psi(int level, const Eigen::VectorXd& x, double t) const;
  double psi(int level, const Eigen::VectorXd& x, double t, std::size_t piece) const;
  /// psi_0 .. psi_{m-1}.
  std::vector<double> psi_levels(const Eigen::VectorXd& x, double t, std::size_t piece) const;

  TopDerivatives top(const Eigen::VectorXd& x, double t, std::size_t piece) const;
  LieDerivatives top_lie(const Eigen::VectorXd& x, double t, std::size_t piece) const;

 private:
  Jet level_jet(int level, const JetVector& x, const Jet& t, std::size_t piece) const;
  void check_time(double t) const;

  std::string id_;
  ChainTag tag_;
  std::shared_ptr<const BarrierFunction> psi0_;
  std::vector<ClassKappaPower> alphas_;
  SystemModel model_;
};

/// Lie derivatives of the top level; free-function form of BarrierChain::top_lie.
LieDerivatives top_lie_derivatives(const BarrierChain& chain, const Eigen::VectorXd& x, double t);

/// Avoid-a-disc chain; relative degree equals alphas.size() (2 for the unicycle).
BarrierChain make_circular_safety(std::string id, const SystemModel& model, const Eigen::VectorXd& center,
                                  double radius, std::vector<ClassKappaPower> alphas, double norm_order = 2.0,
                                  NormForm form = NormForm::kPowered, std::vector<int> position_indices = {0, 1});

BarrierChain make_reach_remain(std::string id, const SystemModel& model, const ReachSpec& spec,
                               std::vector<ClassKappaPower> alphas);

}  // namespace sacbf
