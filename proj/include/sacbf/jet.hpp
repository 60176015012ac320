#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <vector>

namespace sacbf {

/// Second-order forward-mode jet: value, gradient and Hessian of a scalar
/// with respect to a fixed set of seed variables. Arithmetic propagates all
/// three exactly, so barrier recursions built from jets yield exact
/// first and second partial derivatives.
struct Jet {
  double value = 0.0;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;

  Jet() = default;

  /// Constant with `dim` seed variables.
  Jet(double v, Eigen::Index dim)
      : value(v), grad(Eigen::VectorXd::Zero(dim)), hess(Eigen::MatrixXd::Zero(dim, dim)) {}

  /// Seed variable `index` out of `dim`.
  static Jet variable(double v, Eigen::Index index, Eigen::Index dim) {
    Jet j(v, dim);
    j.grad(index) = 1.0;
    return j;
  }

  Eigen::Index dim() const { return grad.size(); }
};

using JetVector = std::vector<Jet>;

// Chain rule for a scalar function h with derivatives d1 = h'(a), d2 = h''(a).
inline Jet compose(const Jet& a, double value, double d1, double d2) {
  Jet r;
  r.value = value;
  r.grad = d1 * a.grad;
  r.hess = d1 * a.hess + d2 * a.grad * a.grad.transpose();
  return r;
}

inline Jet operator+(const Jet& a, const Jet& b) {
  Jet r;
  r.value = a.value + b.value;
  r.grad = a.grad + b.grad;
  r.hess = a.hess + b.hess;
  return r;
}

inline Jet operator-(const Jet& a, const Jet& b) {
  Jet r;
  r.value = a.value - b.value;
  r.grad = a.grad - b.grad;
  r.hess = a.hess - b.hess;
  return r;
}

inline Jet operator-(const Jet& a) {
  Jet r;
  r.value = -a.value;
  r.grad = -a.grad;
  r.hess = -a.hess;
  return r;
}

inline Jet operator*(const Jet& a, const Jet& b) {
  Jet r;
  r.value = a.value * b.value;
  r.grad = b.value * a.grad + a.value * b.grad;
  r.hess = b.value * a.hess + a.value * b.hess + a.grad * b.grad.transpose() +
           b.grad * a.grad.transpose();
  return r;
}

inline Jet operator+(const Jet& a, double s) {
  Jet r = a;
  r.value += s;
  return r;
}
inline Jet operator+(double s, const Jet& a) { return a + s; }
inline Jet operator-(const Jet& a, double s) { return a + (-s); }
inline Jet operator-(double s, const Jet& a) { return (-a) + s; }

inline Jet operator*(const Jet& a, double s) {
  Jet r;
  r.value = a.value * s;
  r.grad = a.grad * s;
  r.hess = a.hess * s;
  return r;
}
inline Jet operator*(double s, const Jet& a) { return a * s; }

inline Jet operator/(const Jet& a, const Jet& b) {
  const double inv = 1.0 / b.value;
  return a * compose(b, inv, -inv * inv, 2.0 * inv * inv * inv);
}

inline Jet sin(const Jet& a) {
  const double s = std::sin(a.value);
  return compose(a, s, std::cos(a.value), -s);
}

inline Jet cos(const Jet& a) {
  const double c = std::cos(a.value);
  return compose(a, c, -std::sin(a.value), -c);
}

inline Jet exp(const Jet& a) {
  const double e = std::exp(a.value);
  return compose(a, e, e, e);
}

inline Jet sqrt(const Jet& a) {
  const double s = std::sqrt(a.value);
  return compose(a, s, 0.5 / s, -0.25 / (s * a.value));
}

/// |a|; the derivative at exactly zero is taken from the positive side.
inline Jet abs(const Jet& a) { return a.value < 0.0 ? -a : a; }

/// a^p for real p. Integer p is evaluated for any sign of a; fractional p
/// requires a >= 0 (checked by callers that own the domain policy).
inline Jet pow(const Jet& a, double p) {
  if (p == 1.0) return a;
  if (p == 2.0) return a * a;
  const double v = std::pow(a.value, p);
  const double d1 = p * std::pow(a.value, p - 1.0);
  const double d2 = p * (p - 1.0) * std::pow(a.value, p - 2.0);
  return compose(a, v, d1, d2);
}

inline Jet dot(const JetVector& a, const JetVector& b) {
  Jet r = a.at(0) * b.at(0);
  for (std::size_t i = 1; i < a.size(); ++i) r = r + a[i] * b[i];
  return r;
}

/// Seeds (x, t) as independent variables: x_i -> index i, t -> index n.
inline JetVector seed_state(const Eigen::VectorXd& x, double t, Jet* time_jet) {
  const Eigen::Index dim = x.size() + 1;
  JetVector xs;
  xs.reserve(static_cast<std::size_t>(x.size()));
  for (Eigen::Index i = 0; i < x.size(); ++i) xs.push_back(Jet::variable(x(i), i, dim));
  *time_jet = Jet::variable(t, x.size(), dim);
  return xs;
}

/// Constant jets (zero-dimensional derivative space) for value-only evaluation.
inline JetVector constant_state(const Eigen::VectorXd& x, double t, Jet* time_jet) {
  JetVector xs;
  xs.reserve(static_cast<std::size_t>(x.size()));
  for (Eigen::Index i = 0; i < x.size(); ++i) xs.emplace_back(x(i), 0);
  *time_jet = Jet(t, 0);
  return xs;
}

}  // namespace sacbf
