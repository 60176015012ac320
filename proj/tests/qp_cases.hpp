#pragma once

// Random convex QP instances shared by the solver tests and the acceptance
// run. Every instance lives in the box [-1, 1]^n, which is also written into
// the problem as explicit rows so the solver and the grid see the same set.

#include "oracles.hpp"
#include "sacbf/qp_solver.hpp"

#include <random>

namespace qp_cases {

struct Case {
  sacbf::QpProblem problem;
  oracle::GridQp grid;
};

inline Case assemble(const Eigen::MatrixXd& H, const Eigen::VectorXd& c, double constant, const Eigen::MatrixXd& A,
                     const Eigen::VectorXd& b) {
  const Eigen::Index n = H.rows();
  Case out;
  out.grid.H = H;
  out.grid.c = c;
  out.grid.constant = constant;
  out.grid.A = A;
  out.grid.b = b;
  out.grid.lo = Eigen::VectorXd::Constant(n, -1.0);
  out.grid.hi = Eigen::VectorXd::Constant(n, 1.0);

  const Eigen::Index m = A.rows();
  out.problem.hessian = H;
  out.problem.linear_cost = c;
  out.problem.constant = constant;
  out.problem.ineq_matrix = Eigen::MatrixXd::Zero(m + 2 * n, n);
  out.problem.ineq_rhs = Eigen::VectorXd::Zero(m + 2 * n);
  out.problem.ineq_matrix.topRows(m) = A;
  out.problem.ineq_rhs.head(m) = b;
  for (Eigen::Index i = 0; i < n; ++i) {
    out.problem.ineq_matrix(m + 2 * i, i) = 1.0;
    out.problem.ineq_rhs(m + 2 * i) = -1.0;
    out.problem.ineq_matrix(m + 2 * i + 1, i) = -1.0;
    out.problem.ineq_rhs(m + 2 * i + 1) = -1.0;
  }
  return out;
}

/// Positive definite Hessian with eigenvalues in roughly [0.5, 4], a linear
/// term that pushes the minimizer against the constraints, and rows that
/// all pass through a slack region around an interior point.
inline Case random_feasible(std::mt19937_64& rng, int n, int rows = 3) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0), slack(0.0, 0.3);
  Eigen::MatrixXd L(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) L(i, j) = unit(rng);
  const Eigen::MatrixXd H = 0.5 * L * L.transpose() / n + 0.5 * Eigen::MatrixXd::Identity(n, n) +
                            Eigen::MatrixXd::Identity(n, n) * std::abs(unit(rng));
  Eigen::VectorXd c(n);
  for (int i = 0; i < n; ++i) c(i) = 3.0 * unit(rng);
  Eigen::VectorXd z0(n);
  for (int i = 0; i < n; ++i) z0(i) = 0.6 * unit(rng);
  Eigen::MatrixXd A(rows, n);
  Eigen::VectorXd b(rows);
  for (int r = 0; r < rows; ++r) {
    for (int i = 0; i < n; ++i) A(r, i) = unit(rng);
    b(r) = A.row(r).dot(z0) - slack(rng);
  }
  return assemble(H, c, unit(rng), A, b);
}

/// Rows a.z >= beta and a.z <= beta - gap, or a row no box point can meet.
inline Case random_infeasible(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0), gap(0.1, 0.5);
  Eigen::VectorXd a(n);
  for (int i = 0; i < n; ++i) a(i) = unit(rng);
  if (a.cwiseAbs().maxCoeff() < 0.2) a(0) = 0.5;
  const Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n) * 2.0;
  const Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  if (unit(rng) > 0.0) {
    const double beta = 0.3 * unit(rng);
    A = Eigen::MatrixXd(2, n);
    A.row(0) = a.transpose();
    A.row(1) = -a.transpose();
    b = Eigen::VectorXd(2);
    b << beta, -(beta - gap(rng));
  } else {
    A = a.transpose();
    b = Eigen::VectorXd::Constant(1, a.cwiseAbs().sum() + gap(rng));
  }
  return assemble(H, c, 0.0, A, b);
}

}  // namespace qp_cases
