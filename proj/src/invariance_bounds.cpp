#include "sacbf/invariance_bounds.hpp"

#include "sacbf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sacbf {

double comparison_lower_bound(double psi0, double lambda, double eta, double dt) {
  if (!(psi0 >= 0.0)) throw DomainError("comparison bound: initial value " + std::to_string(psi0) + " is negative");
  if (!(lambda > 0.0) || !(eta > 0.0) || !(dt >= 0.0))
    throw ContractViolation("comparison bound: need lambda > 0, eta > 0, dt >= 0");
  if (dt == 0.0) return psi0;
  if (std::abs(eta - 1.0) <= 1e-12) return psi0 * std::exp(-lambda * dt);

  const double one_minus_eta = 1.0 - eta;
  const double bracket = std::pow(psi0, one_minus_eta) - lambda * one_minus_eta * dt;
  // For eta > 1, psi0 = 0 gives psi0^(1-eta) = inf and the bracket stays inf;
  // the solution is identically zero.
  if (psi0 == 0.0) return 0.0;
  if (!(bracket > 0.0)) return 0.0;
  return std::max(0.0, std::pow(bracket, 1.0 / one_minus_eta));
}

}  // namespace sacbf
