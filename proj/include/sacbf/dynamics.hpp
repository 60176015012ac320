#pragma once

#include "sacbf/jet.hpp"

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

namespace sacbf {

/// Control-affine system xdot = f(x,t) + g(x,t) u with first-derivative oracles.
///
/// Time is an explicit argument everywhere, also for autonomous systems, so
/// time-varying barriers compose uniformly. `actuation_jac_x` returns n
/// matrices of size n x q, entry j being dg/dx_j. `drift_jet` is optional and
/// evaluates f on second-order jets; barrier chains with relative degree two
/// require it to obtain exact Hessians of the top barrier level.
struct SystemModel {
  using VectorFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)>;
  using MatrixFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&, double)>;
  using TensorFn = std::function<std::vector<Eigen::MatrixXd>(const Eigen::VectorXd&, double)>;
  using JetFn = std::function<JetVector(const JetVector&, const Jet&)>;

  std::string name;
  int state_dim = 0;
  int input_dim = 0;
  std::vector<std::string> state_names;

  VectorFn drift;
  MatrixFn actuation;
  MatrixFn drift_jac_x;
  TensorFn actuation_jac_x;
  VectorFn drift_dt;
  MatrixFn actuation_dt;
  JetFn drift_jet;
};

/// Axis-aligned input set lower <= u <= upper (componentwise).
struct InputBox {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  InputBox() = default;
  InputBox(Eigen::VectorXd lo, Eigen::VectorXd hi);

  Eigen::Index dim() const { return lower.size(); }
  bool contains(const Eigen::VectorXd& u, double tol = 0.0) const;
  Eigen::VectorXd clamp(const Eigen::VectorXd& u) const;
  /// All 2^q corner points, in binary-counting order of the upper-bound mask.
  std::vector<Eigen::VectorXd> vertices() const;
};

/// F = f(x,t) + g(x,t) u.
Eigen::VectorXd eval_field(const SystemModel& model, const Eigen::VectorXd& state,
                           const Eigen::VectorXd& input, double t);

/// Unicycle with state (x, y, theta, v) and input (angular rate, acceleration).
SystemModel make_unicycle();

/// Fills any missing derivative oracle with central finite differences of
/// step `step` (default 1e-6). Oracles already present are left untouched.
SystemModel with_finite_difference_derivatives(SystemModel model, double step = 1e-6);

/// Throws ContractViolation unless every oracle returns correctly-sized
/// outputs at (state, t).
void check_dimensions(const SystemModel& model, const Eigen::VectorXd& state, double t);

}  // namespace sacbf
