#include "sacbf/qp_solver.hpp"

#include "sacbf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace sacbf {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct CoreResult {
  bool feasible = false;
  Eigen::VectorXd z;
  Eigen::VectorXd lambda;       // per normalized row
  Eigen::VectorXd certificate;  // per normalized row, when infeasible
  int iterations = 0;
};

// Goldfarb-Idnani on normalized rows with a positive-definite Hessian.
// Active-set quantities are recomputed from scratch every iteration; the
// problems here have a handful of variables.
CoreResult goldfarb_idnani(const Eigen::MatrixXd& H, const Eigen::VectorXd& c, const Eigen::MatrixXd& A,
                           const Eigen::VectorXd& b, const QpOptions& options) {
  const Eigen::Index n = H.rows();
  const Eigen::Index m = A.rows();
  const Eigen::LLT<Eigen::MatrixXd> llt(H);
  if (llt.info() != Eigen::Success) throw ContractViolation("solve_qp: Hessian is not positive definite");

  CoreResult res;
  res.z = llt.solve(-c);
  res.lambda = Eigen::VectorXd::Zero(m);
  std::vector<Eigen::Index> active;

  auto slack = [&](Eigen::Index i) { return A.row(i).dot(res.z) - b(i); };

  while (true) {
    Eigen::Index p = -1;
    double worst = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (std::find(active.begin(), active.end(), i) != active.end()) continue;
      const double s = slack(i);
      const double tol = options.feasibility_tol * (1.0 + std::abs(b(i)));
      if (s < -tol && s < worst) {
        worst = s;
        p = i;
      }
    }
    if (p < 0) {
      res.feasible = true;
      return res;
    }

    const Eigen::VectorXd np = A.row(p).transpose();
    const Eigen::VectorXd hinv_np = llt.solve(np);
    const double np_norm = np.dot(hinv_np);

    while (true) {
      if (++res.iterations > options.max_iterations)
        throw MaxIterError("solve_qp: iteration limit " + std::to_string(options.max_iterations) + " reached");

      const auto k = static_cast<Eigen::Index>(active.size());
      Eigen::VectorXd r = Eigen::VectorXd::Zero(k);
      Eigen::VectorXd z = hinv_np;
      if (k > 0) {
        Eigen::MatrixXd N(n, k);
        for (Eigen::Index j = 0; j < k; ++j) N.col(j) = A.row(active[static_cast<std::size_t>(j)]).transpose();
        const Eigen::MatrixXd hinv_N = llt.solve(N);
        const Eigen::MatrixXd M = N.transpose() * hinv_N;
        r = M.ldlt().solve(N.transpose() * hinv_np);
        z = hinv_np - hinv_N * r;
      }

      double t_partial = kInf;
      Eigen::Index drop = -1;
      for (Eigen::Index j = 0; j < k; ++j) {
        if (r(j) > 0.0) {
          const double ratio = res.lambda(active[static_cast<std::size_t>(j)]) / r(j);
          if (ratio < t_partial) {
            t_partial = ratio;
            drop = j;
          }
        }
      }
      const double zn = z.dot(np);
      // zn / np_norm is the share of n_p outside the span of the active rows.
      const bool null_step = k >= n || zn <= 1e-10 * np_norm;
      const double t_full = null_step ? kInf : -slack(p) / zn;
      const double t = std::min(t_partial, t_full);

      if (t == kInf) {
        // n_p = N r with r <= 0: a Farkas certificate for the violated row.
        res.feasible = false;
        res.certificate = Eigen::VectorXd::Zero(m);
        res.certificate(p) = 1.0;
        for (Eigen::Index j = 0; j < k; ++j) res.certificate(active[static_cast<std::size_t>(j)]) = -r(j);
        return res;
      }

      if (!null_step) res.z += t * z;
      for (Eigen::Index j = 0; j < k; ++j) res.lambda(active[static_cast<std::size_t>(j)]) -= t * r(j);
      res.lambda(p) += t;

      if (t == t_full) {
        active.push_back(p);
        break;
      }
      const Eigen::Index dropped = active[static_cast<std::size_t>(drop)];
      res.lambda(dropped) = 0.0;
      active.erase(active.begin() + drop);
    }
  }
}

}  // namespace

double QpProblem::objective(const Eigen::VectorXd& z) const {
  return 0.5 * z.dot(hessian * z) + linear_cost.dot(z) + constant;
}

QpSolution solve_qp(const QpProblem& problem, const QpOptions& options) {
  const Eigen::Index n = problem.decision_dim();
  const Eigen::Index m = problem.row_count();
  if (problem.hessian.rows() != n || problem.hessian.cols() != n || problem.ineq_matrix.rows() != m ||
      (m > 0 && problem.ineq_matrix.cols() != n))
    throw ContractViolation("solve_qp: inconsistent problem dimensions");

  const double h_scale = std::max(1.0, problem.hessian.cwiseAbs().maxCoeff());
  if (!problem.hessian.isApprox(problem.hessian.transpose(), 1e-12) &&
      (problem.hessian - problem.hessian.transpose()).cwiseAbs().maxCoeff() > 1e-12 * h_scale)
    throw ContractViolation("solve_qp: Hessian is not symmetric");
  const Eigen::MatrixXd H = 0.5 * (problem.hessian + problem.hessian.transpose());
  const double min_eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(H, Eigen::EigenvaluesOnly).eigenvalues()(0);
  if (min_eig < -1e-10 * h_scale) throw ContractViolation("solve_qp: Hessian is not positive semidefinite");

  // Normalize rows; zero rows are either vacuous or a certificate by themselves.
  Eigen::MatrixXd A(m, n);
  Eigen::VectorXd b(m);
  Eigen::VectorXd scale(m);
  QpSolution sol;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double s = problem.ineq_matrix.row(i).norm();
    if (s == 0.0) {
      if (problem.ineq_rhs(i) > options.feasibility_tol) {
        sol.status = QpStatus::kInfeasible;
        sol.certificate = Eigen::VectorXd::Zero(m);
        sol.certificate(i) = 1.0;
        sol.certificate_residual = 0.0;
        sol.z = Eigen::VectorXd::Zero(n);
        return sol;
      }
      A.row(i).setZero();
      b(i) = -1.0;  // always satisfied
      scale(i) = 1.0;
      continue;
    }
    scale(i) = s;
    A.row(i) = problem.ineq_matrix.row(i) / s;
    b(i) = problem.ineq_rhs(i) / s;
  }

  CoreResult core;
  if (min_eig > 1e-10 * h_scale) {
    core = goldfarb_idnani(H, problem.linear_cost, A, b, options);
  } else {
    // Proximal point iterations on the singular Hessian.
    const double rho = 1e-3 * h_scale;
    const Eigen::MatrixXd Hr = H + rho * Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd center = Eigen::VectorXd::Zero(n);
    int total = 0;
    for (int outer = 0;; ++outer) {
      if (outer >= 100 * options.max_iterations)
        throw MaxIterError("solve_qp: proximal iterations did not converge");
      core = goldfarb_idnani(Hr, problem.linear_cost - rho * center, A, b, options);
      total += core.iterations;
      if (!core.feasible) break;
      const double move = (core.z - center).cwiseAbs().maxCoeff();
      center = core.z;
      if (move <= 1e-13 * (1.0 + core.z.cwiseAbs().maxCoeff())) break;
    }
    core.iterations = total;
  }

  sol.iterations = core.iterations;
  if (!core.feasible) {
    sol.status = QpStatus::kInfeasible;
    sol.z = core.z;
    sol.certificate = core.certificate.cwiseQuotient(scale);
    const double gap = sol.certificate.dot(problem.ineq_rhs);
    const double resid = (problem.ineq_matrix.transpose() * sol.certificate).cwiseAbs().maxCoeff();
    sol.certificate_residual = gap > 0.0 ? resid / gap : kInf;
    return sol;
  }

  sol.status = QpStatus::kOptimal;
  sol.z = core.z;
  sol.multipliers = core.lambda.cwiseQuotient(scale);
  sol.objective = problem.objective(sol.z);

  const Eigen::VectorXd row_slack =
      m > 0 ? Eigen::VectorXd(problem.ineq_matrix * sol.z - problem.ineq_rhs) : Eigen::VectorXd();
  const Eigen::VectorXd grad = problem.hessian * sol.z + problem.linear_cost -
                               (m > 0 ? Eigen::VectorXd(problem.ineq_matrix.transpose() * sol.multipliers)
                                      : Eigen::VectorXd::Zero(n));
  sol.kkt.stationarity = n > 0 ? grad.cwiseAbs().maxCoeff() : 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    sol.kkt.primal = std::max(sol.kkt.primal, -row_slack(i));
    sol.kkt.complementarity = std::max(sol.kkt.complementarity, std::abs(sol.multipliers(i) * row_slack(i)));
  }
  return sol;
}

}  // namespace sacbf
