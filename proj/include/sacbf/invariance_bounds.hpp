#pragma once

namespace sacbf {

/// Closed-form lower envelope of psi(t0 + dt) for any trajectory obeying
/// psi' >= -lambda psi^eta with psi(t0) = psi0 >= 0:
///   psi0 * exp(-lambda dt)                                   for eta = 1
///   [psi0^(1-eta) - lambda (1-eta) dt]_+^(1/(1-eta))         otherwise.
/// Exponents within 1e-12 of one use the exponential branch. The result is
/// never negative; a clamped bracket yields 0 (the envelope is extinct).
/// Throws DomainError if psi0 < 0 and ContractViolation on bad parameters.
double comparison_lower_bound(double psi0, double lambda, double eta, double dt);

}  // namespace sacbf
