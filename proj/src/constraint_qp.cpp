#include "sacbf/constraint_qp.hpp"

#include "sacbf/errors.hpp"
#include "sacbf/invariance_bounds.hpp"

#include <string>

namespace sacbf {
namespace {

constexpr double kSetExitTol = 1e-9;

RowTag row_tag(const BarrierChain& chain) { return chain.tag() == ChainTag::kReach ? RowTag::kReach : RowTag::kSafety; }

}  // namespace

SacbfRow sacbf_row(const BarrierChain& chain, const Eigen::VectorXd& state, double t_k, double dt, double m_bar,
                   bool relaxed) {
  if (!(dt > 0.0)) throw ContractViolation("sacbf_row: dt must be > 0");
  if (!(m_bar >= 0.0)) throw ContractViolation("sacbf_row: m_bar must be >= 0");
  const std::size_t piece = chain.piece_at(t_k);
  const TopDerivatives d = chain.top(state, t_k, piece);
  if (d.value < -kSetExitTol) {
    throw SetExitError("chain '" + chain.id() + "': top level " + std::to_string(d.value) + " < 0 at t=" +
                       std::to_string(t_k));
  }
  const double psi = std::max(d.value, 0.0);
  const ClassKappaPower& alpha = chain.top_alpha();
  const double bound = comparison_lower_bound(psi, alpha.lambda, alpha.eta, dt);

  SacbfRow row;
  row.u_coeffs = chain.model().actuation(state, t_k).transpose() * d.grad_x;
  row.drift_rate = d.grad_x.dot(chain.model().drift(state, t_k)) + d.dt;
  row.tag = row_tag(chain);
  row.chain_id = chain.id();
  row.relaxed = relaxed;
  row.psi_top = d.value;
  row.comparison_bound = bound;
  row.m_bar = m_bar;
  row.dt = dt;
  const double margin = 0.5 * m_bar * dt;
  if (relaxed) {
    row.omega_coeff = -bound / dt;
    row.rhs = -row.drift_rate - d.value / dt + margin;
  } else {
    row.rhs = -row.drift_rate + (bound - d.value) / dt + margin;
  }
  return row;
}

SacbfRow hocbf_row(const BarrierChain& chain, const Eigen::VectorXd& state, double t) {
  const std::size_t piece = chain.piece_at(t);
  const TopDerivatives d = chain.top(state, t, piece);
  const ClassKappaPower& alpha = chain.top_alpha();
  double alpha_value = 0.0;
  try {
    alpha_value = alpha(d.value);
  } catch (const DomainError& e) {
    throw SetExitError("chain '" + chain.id() + "': " + e.what());
  }
  SacbfRow row;
  row.u_coeffs = chain.model().actuation(state, t).transpose() * d.grad_x;
  row.drift_rate = d.grad_x.dot(chain.model().drift(state, t)) + d.dt;
  row.rhs = -row.drift_rate - alpha_value;
  row.tag = row_tag(chain);
  row.chain_id = chain.id();
  row.psi_top = d.value;
  return row;
}

QpProblem build_qp(const std::vector<SacbfRow>& rows, const InputBox& input_box, const std::vector<double>& weights) {
  const Eigen::Index q = input_box.dim();
  Eigen::Index relaxed = 0;
  for (const auto& r : rows) {
    if (r.u_coeffs.size() != q) throw ContractViolation("build_qp: row '" + r.chain_id + "' has wrong input dimension");
    if (r.relaxed) ++relaxed;
  }
  if (static_cast<Eigen::Index>(weights.size()) != relaxed)
    throw ContractViolation("build_qp: need one weight per relaxed row");
  for (double w : weights)
    if (!(w > 0.0)) throw ContractViolation("build_qp: relaxation weights must be > 0");

  const Eigen::Index dim = q + relaxed;
  QpProblem qp;
  qp.hessian = Eigen::MatrixXd::Zero(dim, dim);
  qp.linear_cost = Eigen::VectorXd::Zero(dim);
  qp.hessian.topLeftCorner(q, q) = 2.0 * Eigen::MatrixXd::Identity(q, q);
  for (Eigen::Index k = 0; k < relaxed; ++k) {
    const double w = weights[static_cast<std::size_t>(k)];
    qp.hessian(q + k, q + k) = 2.0 * w;
    qp.linear_cost(q + k) = -2.0 * w;
    qp.constant += w;
  }

  const Eigen::Index n_rows = static_cast<Eigen::Index>(rows.size()) + 2 * q + 2 * relaxed;
  qp.ineq_matrix = Eigen::MatrixXd::Zero(n_rows, dim);
  qp.ineq_rhs = Eigen::VectorXd::Zero(n_rows);
  Eigen::Index row = 0;
  Eigen::Index omega = 0;
  for (const auto& r : rows) {
    qp.ineq_matrix.block(row, 0, 1, q) = r.u_coeffs.transpose();
    if (r.relaxed) qp.ineq_matrix(row, q + omega++) = r.omega_coeff;
    qp.ineq_rhs(row) = r.rhs;
    qp.row_labels.push_back(r.chain_id);
    ++row;
  }
  for (Eigen::Index i = 0; i < q; ++i) {
    qp.ineq_matrix(row, i) = 1.0;
    qp.ineq_rhs(row) = input_box.lower(i);
    qp.row_labels.push_back("u" + std::to_string(i) + ">=lower");
    ++row;
    qp.ineq_matrix(row, i) = -1.0;
    qp.ineq_rhs(row) = -input_box.upper(i);
    qp.row_labels.push_back("u" + std::to_string(i) + "<=upper");
    ++row;
  }
  for (Eigen::Index k = 0; k < relaxed; ++k) {
    qp.ineq_matrix(row, q + k) = 1.0;
    qp.ineq_rhs(row) = 0.0;
    qp.row_labels.push_back("omega" + std::to_string(k) + ">=0");
    ++row;
    qp.ineq_matrix(row, q + k) = -1.0;
    qp.ineq_rhs(row) = -1.0;
    qp.row_labels.push_back("omega" + std::to_string(k) + "<=1");
    ++row;
  }
  return qp;
}

}  // namespace sacbf
