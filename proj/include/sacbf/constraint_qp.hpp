#pragma once

#include "sacbf/barrier.hpp"
#include "sacbf/dynamics.hpp"
#include "sacbf/qp_solver.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace sacbf {

enum class RowTag { kSafety, kReach, kInputBound };

/// One linear inequality  u_coeffs . u + omega_coeff * omega >= rhs.
/// `comparison_bound` and `psi_top` are kept for auditing the certificate.
struct SacbfRow {
  Eigen::VectorXd u_coeffs;
  double omega_coeff = 0.0;
  double rhs = 0.0;
  RowTag tag = RowTag::kSafety;
  std::string chain_id;
  bool relaxed = false;

  double psi_top = 0.0;
  double comparison_bound = 0.0;
  double m_bar = 0.0;
  double dt = 0.0;
  /// psi_{m-1}' = drift_rate + u_coeffs . u
  double drift_rate = 0.0;

  double lhs(const Eigen::VectorXd& u, double omega = 1.0) const { return u_coeffs.dot(u) + omega_coeff * omega; }
};

/// Sampled-data barrier row for one chain at (state, t_k):
///   Lf + Lg u + dpsi/dt >= (L - psi)/dt + m_bar dt / 2         (unrelaxed)
///   Lg u - (L/dt) omega >= -Lf - dpsi/dt - psi/dt + m_bar dt / 2  (relaxed)
/// with L the comparison bound of the top level over dt.
/// Throws SetExitError if psi_{m-1}(t_k) < -1e-9.
SacbfRow sacbf_row(const BarrierChain& chain, const Eigen::VectorXd& state, double t_k, double dt, double m_bar,
                   bool relaxed);

/// Continuous-time HOCBF row  psi_{m-1}' + alpha_m(psi_{m-1}) >= 0.
/// Defined whenever alpha_m(psi_{m-1}) is; a negative top level with a
/// fractional exponent raises SetExitError.
SacbfRow hocbf_row(const BarrierChain& chain, const Eigen::VectorXd& state, double t);

/// Decision vector z = (u, omega_1 .. omega_K), one omega per relaxed row in
/// order. Cost u'u + sum_k q_k (omega_k - 1)^2; box rows for u and omega in [0, 1].
/// `weights` holds one entry per relaxed row.
QpProblem build_qp(const std::vector<SacbfRow>& rows, const InputBox& input_box, const std::vector<double>& weights);

}  // namespace sacbf
