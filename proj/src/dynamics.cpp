#include "sacbf/dynamics.hpp"

#include "sacbf/errors.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace sacbf {

InputBox::InputBox(Eigen::VectorXd lo, Eigen::VectorXd hi) : lower(std::move(lo)), upper(std::move(hi)) {
  if (lower.size() != upper.size()) throw ContractViolation("InputBox: bound dimensions differ");
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    if (!(lower(i) <= upper(i))) throw ContractViolation("InputBox: lower > upper in component " + std::to_string(i));
  }
}

bool InputBox::contains(const Eigen::VectorXd& u, double tol) const {
  if (u.size() != lower.size()) return false;
  return ((u - lower).array() >= -tol).all() && ((upper - u).array() >= -tol).all();
}

Eigen::VectorXd InputBox::clamp(const Eigen::VectorXd& u) const { return u.cwiseMax(lower).cwiseMin(upper); }

std::vector<Eigen::VectorXd> InputBox::vertices() const {
  const auto q = static_cast<unsigned>(lower.size());
  std::vector<Eigen::VectorXd> out;
  out.reserve(std::size_t{1} << q);
  for (unsigned mask = 0; mask < (1u << q); ++mask) {
    Eigen::VectorXd v = lower;
    for (unsigned i = 0; i < q; ++i)
      if (mask & (1u << i)) v(i) = upper(i);
    out.push_back(std::move(v));
  }
  return out;
}

Eigen::VectorXd eval_field(const SystemModel& model, const Eigen::VectorXd& state, const Eigen::VectorXd& input,
                           double t) {
  if (state.size() != model.state_dim || input.size() != model.input_dim) {
    throw ContractViolation("eval_field: expected state of size " + std::to_string(model.state_dim) +
                            " and input of size " + std::to_string(model.input_dim));
  }
  return model.drift(state, t) + model.actuation(state, t) * input;
}

SystemModel make_unicycle() {
  SystemModel m;
  m.name = "unicycle";
  m.state_dim = 4;
  m.input_dim = 2;
  m.state_names = {"x", "y", "theta", "v"};

  m.drift = [](const Eigen::VectorXd& s, double) {
    Eigen::VectorXd f(4);
    f << s(3) * std::cos(s(2)), s(3) * std::sin(s(2)), 0.0, 0.0;
    return f;
  };
  m.actuation = [](const Eigen::VectorXd&, double) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(4, 2);
    g(2, 0) = 1.0;
    g(3, 1) = 1.0;
    return g;
  };
  m.drift_jac_x = [](const Eigen::VectorXd& s, double) {
    const double c = std::cos(s(2));
    const double sn = std::sin(s(2));
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(4, 4);
    j(0, 2) = -s(3) * sn;
    j(0, 3) = c;
    j(1, 2) = s(3) * c;
    j(1, 3) = sn;
    return j;
  };
  m.actuation_jac_x = [](const Eigen::VectorXd&, double) {
    return std::vector<Eigen::MatrixXd>(4, Eigen::MatrixXd::Zero(4, 2));
  };
  m.drift_dt = [](const Eigen::VectorXd&, double) { return Eigen::VectorXd::Zero(4).eval(); };
  m.actuation_dt = [](const Eigen::VectorXd&, double) { return Eigen::MatrixXd::Zero(4, 2).eval(); };
  m.drift_jet = [](const JetVector& s, const Jet& t) {
    const Jet zero(0.0, t.dim());
    return JetVector{s[3] * cos(s[2]), s[3] * sin(s[2]), zero, zero};
  };
  return m;
}

SystemModel with_finite_difference_derivatives(SystemModel model, double step) {
  const int n = model.state_dim;
  if (!model.drift || !model.actuation) throw ContractViolation("with_finite_difference_derivatives: f and g required");
  const auto f = model.drift;
  const auto g = model.actuation;

  if (!model.drift_jac_x) {
    model.drift_jac_x = [f, n, step](const Eigen::VectorXd& s, double t) {
      Eigen::MatrixXd j(n, n);
      for (int k = 0; k < n; ++k) {
        Eigen::VectorXd hi = s, lo = s;
        hi(k) += step;
        lo(k) -= step;
        j.col(k) = (f(hi, t) - f(lo, t)) / (2.0 * step);
      }
      return j;
    };
  }
  if (!model.actuation_jac_x) {
    model.actuation_jac_x = [g, n, step](const Eigen::VectorXd& s, double t) {
      std::vector<Eigen::MatrixXd> out;
      out.reserve(static_cast<std::size_t>(n));
      for (int k = 0; k < n; ++k) {
        Eigen::VectorXd hi = s, lo = s;
        hi(k) += step;
        lo(k) -= step;
        out.push_back((g(hi, t) - g(lo, t)) / (2.0 * step));
      }
      return out;
    };
  }
  if (!model.drift_dt) {
    model.drift_dt = [f, step](const Eigen::VectorXd& s, double t) {
      return ((f(s, t + step) - f(s, t - step)) / (2.0 * step)).eval();
    };
  }
  if (!model.actuation_dt) {
    model.actuation_dt = [g, step](const Eigen::VectorXd& s, double t) {
      return ((g(s, t + step) - g(s, t - step)) / (2.0 * step)).eval();
    };
  }
  return model;
}

void check_dimensions(const SystemModel& model, const Eigen::VectorXd& state, double t) {
  const int n = model.state_dim;
  const int q = model.input_dim;
  auto fail = [&](const std::string& what) {
    throw ContractViolation("model '" + model.name + "': " + what + " has wrong dimensions");
  };
  if (n <= 0 || q <= 0) fail("state/input dimension");
  if (state.size() != n) fail("state argument");
  if (model.drift(state, t).size() != n) fail("drift");
  const Eigen::MatrixXd g = model.actuation(state, t);
  if (g.rows() != n || g.cols() != q) fail("actuation");
  const Eigen::MatrixXd fx = model.drift_jac_x(state, t);
  if (fx.rows() != n || fx.cols() != n) fail("drift_jac_x");
  const auto gx = model.actuation_jac_x(state, t);
  if (static_cast<int>(gx.size()) != n) fail("actuation_jac_x");
  for (const auto& m : gx)
    if (m.rows() != n || m.cols() != q) fail("actuation_jac_x slice");
  if (model.drift_dt(state, t).size() != n) fail("drift_dt");
  const Eigen::MatrixXd gt = model.actuation_dt(state, t);
  if (gt.rows() != n || gt.cols() != q) fail("actuation_dt");
  if (!model.state_names.empty() && static_cast<int>(model.state_names.size()) != n) fail("state_names");
}

}  // namespace sacbf
