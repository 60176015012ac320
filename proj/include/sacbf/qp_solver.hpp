#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace sacbf {

/// minimize 0.5 z'Hz + c'z + constant  subject to  A z >= b.
struct QpProblem {
  Eigen::MatrixXd hessian;
  Eigen::VectorXd linear_cost;
  double constant = 0.0;
  Eigen::MatrixXd ineq_matrix;
  Eigen::VectorXd ineq_rhs;
  std::vector<std::string> row_labels;

  Eigen::Index decision_dim() const { return linear_cost.size(); }
  Eigen::Index row_count() const { return ineq_rhs.size(); }
  double objective(const Eigen::VectorXd& z) const;
};

enum class QpStatus { kOptimal, kInfeasible };

struct KktResiduals {
  double stationarity = 0.0;     ///< ||Hz + c - A'lambda||_inf
  double primal = 0.0;           ///< max_i max(0, b_i - a_i z)
  double complementarity = 0.0;  ///< max_i |lambda_i (a_i z - b_i)|
};

struct QpSolution {
  QpStatus status = QpStatus::kInfeasible;
  Eigen::VectorXd z;
  Eigen::VectorXd multipliers;
  double objective = 0.0;
  KktResiduals kkt;
  int iterations = 0;
  /// When infeasible: y >= 0 with A'y ~ 0 and y'b > 0.
  Eigen::VectorXd certificate;
  double certificate_residual = 0.0;  ///< ||A'y||_inf / (y'b)
};

struct QpOptions {
  int max_iterations = 500;
  double feasibility_tol = 1e-12;
};

/// Dense dual active-set solver (Goldfarb-Idnani) for small problems.
/// A positive-semidefinite but singular Hessian is handled with proximal
/// iterations. Deterministic for a fixed problem.
/// Throws ContractViolation for a non-symmetric or indefinite Hessian and
/// MaxIterError when the iteration cap is reached.
QpSolution solve_qp(const QpProblem& problem, const QpOptions& options = {});

}  // namespace sacbf
