#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "oracles.hpp"
#include "sacbf/constraint_qp.hpp"
#include "sacbf/errors.hpp"
#include "sacbf/invariance_bounds.hpp"
#include "sacbf/qp_solver.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace sacbf;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

VectorXd v4(double a, double b, double c, double d) { return Eigen::Vector4d(a, b, c, d); }
VectorXd v2(double a, double b) { return Eigen::Vector2d(a, b); }

BarrierChain obstacle(const SystemModel& m, double lambda = 2.0) {
  return make_circular_safety("obstacle", m, v2(0, 0), 1.0, {{lambda, 1.0}, {lambda, 1.0}});
}

BarrierChain target(const SystemModel& m) {
  ReachSpec s;
  s.center = v2(3, 0);
  s.eps0 = 7;
  s.eps_d = 1;
  s.t_start = 0;
  s.t_reach = 5;
  return make_reach_remain("target", m, s, {{2.0, 1.0}, {2.0, 1.0}});
}

QpProblem to_grid_problem(const QpProblem& p, oracle::GridQp& g, double lo, double hi) {
  g.H = p.hessian;
  g.c = p.linear_cost;
  g.constant = p.constant;
  g.A = p.ineq_matrix;
  g.b = p.ineq_rhs;
  g.lo = VectorXd::Constant(p.decision_dim(), lo);
  g.hi = VectorXd::Constant(p.decision_dim(), hi);
  return p;
}

}  // namespace

TEST_CASE("first case-study row matches the hand-derived Lie derivatives") {
  const SystemModel m = make_unicycle();
  const BarrierChain c = obstacle(m);
  const double th = std::numbers::pi / 12;
  const VectorXd x = v4(-3, 0, th, 1);
  const double m_bar = 12.5;
  const SacbfRow row = sacbf_row(c, x, 0.0, 0.1, m_bar, false);
  // psi_1 = 2v(x cos th + y sin th) + 2(x^2 + y^2 - 1)
  const double psi1 = -6.0 * std::cos(th) + 16.0;
  const double lf = 2.0 - 12.0 * std::cos(th);
  CHECK(row.u_coeffs(0) == doctest::Approx(6.0 * std::sin(th)).epsilon(1e-8));
  CHECK(row.u_coeffs(1) == doctest::Approx(-6.0 * std::cos(th)).epsilon(1e-8));
  CHECK(row.drift_rate == doctest::Approx(lf).epsilon(1e-8));
  CHECK(row.psi_top == doctest::Approx(psi1).epsilon(1e-12));
  CHECK(row.comparison_bound == doctest::Approx(psi1 * std::exp(-0.2)).epsilon(1e-12));
  const double rhs = -lf + (psi1 * std::exp(-0.2) - psi1) / 0.1 + 0.5 * m_bar * 0.1;
  CHECK(row.rhs == doctest::Approx(rhs).epsilon(1e-10));
  CHECK(row.omega_coeff == 0.0);
  CHECK(row.tag == RowTag::kSafety);
  CHECK(row.chain_id == "obstacle");

  const SacbfRow relaxed = sacbf_row(c, x, 0.0, 0.1, m_bar, true);
  CHECK(relaxed.relaxed);
  CHECK(relaxed.omega_coeff == doctest::Approx(-psi1 * std::exp(-0.2) / 0.1).epsilon(1e-12));
  CHECK(relaxed.rhs == doctest::Approx(-lf - psi1 / 0.1 + 0.5 * m_bar * 0.1).epsilon(1e-10));
  // at omega = 1 the relaxed row is the unrelaxed one
  const VectorXd u = v2(0.3, -0.7);
  CHECK(relaxed.lhs(u, 1.0) - relaxed.rhs == doctest::Approx(row.lhs(u) - row.rhs).epsilon(1e-10));
}

TEST_CASE("boundary state leaves only the bound margin") {
  const SystemModel m = make_unicycle();
  const BarrierChain c = obstacle(m);
  const VectorXd x = v4(0, 1, 0, 2);  // on the circle, moving tangentially
  const SacbfRow row = sacbf_row(c, x, 0.0, 0.1, 8.0, false);
  CHECK(row.comparison_bound == 0.0);
  CHECK(row.rhs + row.drift_rate == doctest::Approx(0.5 * 8.0 * 0.1).epsilon(1e-9));
}

TEST_CASE("set exit and contract errors") {
  const SystemModel m = make_unicycle();
  const BarrierChain c = obstacle(m);
  const VectorXd inside = v4(0.5, 0, 0, 1);
  CHECK(c.psi(1, inside, 0.0) < 0.0);
  CHECK_THROWS_AS(sacbf_row(c, inside, 0.0, 0.1, 1.0, false), SetExitError);
  CHECK_THROWS_AS(sacbf_row(c, v4(-3, 0, 0, 1), 0.0, 0.0, 1.0, false), ContractViolation);
  CHECK_THROWS_AS(sacbf_row(c, v4(-3, 0, 0, 1), 0.0, 0.1, -1.0, false), ContractViolation);

  const BarrierChain frac = make_circular_safety("frac", m, v2(0, 0), 1.0, {{2.0, 1.0}, {2.0, 0.5}});
  CHECK_THROWS_AS(hocbf_row(frac, inside, 0.0), SetExitError);
  CHECK_NOTHROW(hocbf_row(c, inside, 0.0));
}

TEST_CASE("HOCBF row is looser than the sampled row") {
  const SystemModel m = make_unicycle();
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> pos(-5, 5), ang(-3, 3), spd(-2, 2), mb(0.1, 50), dts(0.01, 0.5);
  const BarrierChain c = obstacle(m);
  int seen = 0;
  for (int i = 0; i < 500 && seen < 100; ++i) {
    const VectorXd x = v4(pos(rng), pos(rng), ang(rng), spd(rng));
    if (c.psi(1, x, 0.0) < 0.0 || c.psi(0, x, 0.0) < 0.0) continue;
    ++seen;
    const SacbfRow h = hocbf_row(c, x, 0.0);
    const SacbfRow s = sacbf_row(c, x, 0.0, dts(rng), mb(rng), false);
    CHECK((h.u_coeffs - s.u_coeffs).norm() == 0.0);
    CHECK(h.rhs < s.rhs);
    CHECK(h.rhs == doctest::Approx(-h.drift_rate - 2.0 * h.psi_top));
  }
  CHECK(seen == 100);
}

TEST_CASE("sampled row tends to the HOCBF row as dt shrinks") {
  const SystemModel m = make_unicycle();
  const BarrierChain c = obstacle(m);
  const BarrierChain r = target(m);
  const VectorXd x = v4(-2, 0.5, 0.3, 1.1);
  for (const BarrierChain* ch : {&c, &r}) {
    const SacbfRow h = hocbf_row(*ch, x, 1.0);
    const SacbfRow s = sacbf_row(*ch, x, 1.0, 1e-6, 0.0, false);
    CHECK((h.u_coeffs - s.u_coeffs).cwiseAbs().maxCoeff() <= 1e-5);
    CHECK(oracle::relative_error(s.rhs, h.rhs) <= 1e-5);
    // the remaining gap is the second-order term of exp(-lambda dt)
    const double lambda = ch->top_alpha().lambda;
    CHECK(s.rhs - h.rhs == doctest::Approx(0.5 * lambda * lambda * h.psi_top * 1e-6).epsilon(1e-3));
  }
  // reach rows carry the explicit time partial in the drift rate
  CHECK(hocbf_row(r, x, 1.0).tag == RowTag::kReach);
  CHECK(hocbf_row(r, x, 1.0).drift_rate != doctest::Approx(top_lie_derivatives(r, x, 1.0).lf));
  CHECK(hocbf_row(c, x, 0.0).drift_rate == doctest::Approx(top_lie_derivatives(c, x, 0.0).lf));
}

TEST_CASE("build_qp layout and trivial optimum") {
  const InputBox box(v2(-10, -10), v2(10, 10));
  const QpProblem empty = build_qp({}, box, {});
  CHECK(empty.decision_dim() == 2);
  CHECK(empty.row_count() == 4);
  const QpSolution s = solve_qp(empty);
  REQUIRE(s.status == QpStatus::kOptimal);
  CHECK(s.z.norm() < 1e-12);

  const SystemModel m = make_unicycle();
  const SacbfRow slack_row = sacbf_row(obstacle(m), v4(-3, 0, 0, 1), 0.0, 0.1, 1.0, true);
  const QpProblem one = build_qp({slack_row}, box, {200.0});
  CHECK(one.decision_dim() == 3);
  CHECK(one.row_count() == 1 + 4 + 2);
  CHECK(one.hessian(2, 2) == 400.0);
  CHECK(one.linear_cost(2) == -400.0);
  CHECK(one.constant == 200.0);
  const QpSolution t = solve_qp(one);
  REQUIRE(t.status == QpStatus::kOptimal);
  CHECK(t.z.head(2).norm() < 1e-9);
  CHECK(t.z(2) == doctest::Approx(1.0));
  CHECK(one.objective(t.z) == doctest::Approx(0.0).scale(1.0));

  CHECK_THROWS_AS(build_qp({slack_row}, box, {}), ContractViolation);
  CHECK_THROWS_AS(build_qp({slack_row}, box, {0.0}), ContractViolation);
}

TEST_CASE("relaxation rescues a row that is infeasible at omega = 1") {
  // u - 4 omega >= -2.5 with u in [-1, 1]: omega = 1 needs u >= 1.5, omega = 0 does not
  SacbfRow row;
  row.u_coeffs = VectorXd::Constant(1, 1.0);
  row.omega_coeff = -4.0;
  row.rhs = -2.5;
  row.relaxed = true;
  row.chain_id = "r";
  const InputBox box(VectorXd::Constant(1, -1.0), VectorXd::Constant(1, 1.0));
  CHECK(row.lhs(VectorXd::Constant(1, 1.0), 1.0) < row.rhs);  // no u works at omega = 1
  const QpProblem p = build_qp({row}, box, {3.0});
  const QpSolution s = solve_qp(p);
  REQUIRE(s.status == QpStatus::kOptimal);
  CHECK(s.z(1) < 1.0);
  oracle::GridQp g;
  to_grid_problem(p, g, -1.0, 1.0);
  const oracle::GridResult best = oracle::grid_search(g, 1e-3, 3);
  REQUIRE(best.feasible);
  CHECK(std::abs(s.objective - best.objective) <= 1e-4);
}

TEST_CASE("relaxation never costs feasibility or objective") {
  // If the unrelaxed QP is feasible, (u, omega = 1) is feasible for the relaxed
  // one, so the relaxed optimum is no worse. Omega stays at 1 when no barrier
  // row binds; a binding row lets omega drop slightly below 1 because the
  // penalty on omega is flat at 1.
  const SystemModel m = make_unicycle();
  const InputBox box(v2(-10, -10), v2(10, 10));
  const BarrierChain c = obstacle(m);
  const BarrierChain r = target(m);
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> pos(-4, 4), ang(-3, 3), spd(0, 2), mb(0, 40), tt(0, 4.8);
  int feasible = 0;
  int slack_cases = 0;
  for (int i = 0; i < 400 && feasible < 100; ++i) {
    const VectorXd x = v4(pos(rng), pos(rng), ang(rng), spd(rng));
    const double t = tt(rng);
    std::vector<SacbfRow> hard, soft;
    try {
      hard = {sacbf_row(c, x, t, 0.1, mb(rng), false), sacbf_row(r, x, t, 0.1, mb(rng), false)};
    } catch (const SetExitError&) {
      continue;
    }
    soft.push_back(sacbf_row(c, x, t, 0.1, hard[0].m_bar, true));
    soft.push_back(sacbf_row(r, x, t, 0.1, hard[1].m_bar, true));
    const QpSolution a = solve_qp(build_qp(hard, box, {}));
    if (a.status != QpStatus::kOptimal) continue;
    ++feasible;
    const QpProblem relaxed = build_qp(soft, box, {5.0, 5.0});
    VectorXd lifted(4);
    lifted << a.z, 1.0, 1.0;
    CHECK(((relaxed.ineq_matrix * lifted - relaxed.ineq_rhs).array() >= -1e-9).all());
    const QpSolution b = solve_qp(relaxed);
    REQUIRE(b.status == QpStatus::kOptimal);
    CHECK(b.objective <= a.objective + 1e-9);
    const bool binding = hard[0].lhs(a.z) - hard[0].rhs < 1e-9 || hard[1].lhs(a.z) - hard[1].rhs < 1e-9;
    if (!binding) {
      ++slack_cases;
      CHECK(b.z(2) == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(b.z(3) == doctest::Approx(1.0).epsilon(1e-9));
      CHECK((b.z.head(2) - a.z).norm() <= 1e-9);
    }
  }
  CHECK(feasible >= 50);
  CHECK(slack_cases >= 10);
}
