#include <doctest.h>

#include <cstring>
#include <random>

#include "commplan/errors.hpp"
#include "commplan/local_qp.hpp"
#include "oracles.hpp"

using namespace commplan;

namespace {

Vec v2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

QuadraticProgram unconstrained(const Mat& h, const Vec& g) {
  QuadraticProgram qp;
  qp.hessian = h;
  qp.linear = g;
  qp.ineq_coeff = Mat::Zero(0, g.size());
  qp.ineq_rhs = Vec::Zero(0);
  qp.box_lo = Vec::Constant(g.size(), -std::numeric_limits<double>::infinity());
  qp.box_hi = Vec::Constant(g.size(), std::numeric_limits<double>::infinity());
  return qp;
}

QuadraticProgram random_qp(std::mt19937_64& rng, int n, int m) {
  std::normal_distribution<double> n01;
  Mat r(n, n);
  for (auto& x : r.reshaped()) x = n01(rng);
  Vec g(n);
  for (auto& x : g) x = n01(rng);
  QuadraticProgram qp = unconstrained(r.transpose() * r + 0.5 * Mat::Identity(n, n), g);
  qp.ineq_coeff.resize(m, n);
  for (auto& x : qp.ineq_coeff.reshaped()) x = n01(rng);
  qp.ineq_rhs.resize(m);
  for (auto& x : qp.ineq_rhs) x = std::abs(n01(rng)) * 0.3;  // x = 0 stays feasible
  return qp;
}

PlanningProblem problem(Role role, const Vec& pos, const Vec& poi, double h, int steps, const Vec& grad,
                        double slack_per_robot, std::size_t n_trades, std::span<const Vec> others = {}) {
  PlanningProblem p;
  p.position = pos;
  p.cost.role = role;
  p.cost.h = h;
  p.cost.poi = poi;
  p.horizon.steps = steps;
  p.horizon.dim = 2;
  p.horizon.u_max = 0.5;
  p.budget = budget_constraint(grad, slack_per_robot, 0.0, 1, n_trades, p.horizon);
  p.collision = stack_collision(pos, 0.3, others, 0.1, p.horizon);
  return p;
}

}  // namespace

TEST_CASE("solver: unconstrained least squares") {
  const Vec a = v2(1.5, -2.0);
  const QpResult r = solve_qp(unconstrained(Mat::Identity(2, 2), -a));
  REQUIRE(r.optimal());
  CHECK((r.x - a).norm() <= 1e-12);
}

TEST_CASE("solver: active bound") {
  // x^2 with x >= 1
  QuadraticProgram qp = unconstrained(Mat::Constant(1, 1, 2.0), Vec::Zero(1));
  qp.box_lo(0) = 1.0;
  const QpResult r = solve_qp(qp);
  REQUIRE(r.optimal());
  CHECK(r.x(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.objective == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.lower_multipliers(0) == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("solver: infeasible rows are reported") {
  QuadraticProgram qp = unconstrained(Mat::Identity(1, 1), Vec::Zero(1));
  qp.ineq_coeff = Mat::Constant(2, 1, 1.0);
  qp.ineq_coeff(1, 0) = -1.0;
  qp.ineq_rhs = v2(-1.0, -1.0);  // x <= -1 and x >= 1
  CHECK(solve_qp(qp).status == SolveStatus::Infeasible);
  QuadraticProgram bad = unconstrained(Mat::Identity(2, 2), Vec::Zero(2));
  bad.box_lo(0) = 1.0;
  bad.box_hi(0) = 0.0;
  CHECK_THROWS_AS(solve_qp(bad), DimensionError);
}

TEST_CASE("solver agrees with a first-order dual oracle on random 6-variable problems") {
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 25; ++trial) {
    const QuadraticProgram qp = random_qp(rng, 6, 4);
    const QpResult r = solve_qp(qp);
    REQUIRE(r.optimal());
    const Vec ref = oracle::dual_projected_gradient(qp.hessian, qp.linear, qp.ineq_coeff, qp.ineq_rhs);
    CHECK((r.x - ref).lpNorm<Eigen::Infinity>() <= 1e-5);
    CHECK(qp.max_violation(r.x) <= 1e-7);
    CHECK(stationarity_residual(qp, r) <= 1e-6 * std::max(1.0, qp.linear.norm()));
    // complementary slackness
    const Vec slack = qp.ineq_rhs - qp.ineq_coeff * r.x;
    for (Eigen::Index i = 0; i < slack.size(); ++i) {
      CHECK(r.row_multipliers(i) >= 0.0);
      CHECK(std::abs(r.row_multipliers(i) * slack(i)) <= 1e-5);
    }
  }
}

TEST_CASE("solver is bitwise deterministic") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    QuadraticProgram qp = random_qp(rng, 8, 10);
    qp.box_lo = Vec::Constant(8, -0.3);
    qp.box_hi = Vec::Constant(8, 0.3);
    const QpResult a = solve_qp(qp), b = solve_qp(qp);
    REQUIRE(a.x.size() == b.x.size());
    CHECK(std::memcmp(a.x.data(), b.x.data(), sizeof(double) * static_cast<std::size_t>(a.x.size())) == 0);
    CHECK(std::memcmp(&a.objective, &b.objective, sizeof(double)) == 0);
  }
}

TEST_CASE("dropping budget rows never raises the optimum") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int trial = 0; trial < 50; ++trial) {
    const Vec grad = v2(u(rng), u(rng));
    PlanningProblem p = problem(Role::Inspection, v2(0, 0), v2(u(rng), u(rng)), 0.1, 2, grad, 0.05, 0);
    const LocalSolution with = solve_local(build_final_problem(p, Vec::Zero(0)), 4);
    p.budget = budget_constraint(grad, 0.05, 0.0, 1, 0, p.horizon);
    p.budget.coeff_u.resize(0, 4);
    p.budget.coeff_t.resize(0, 0);
    p.budget.rhs.resize(0);
    const LocalSolution without = solve_local(build_final_problem(p, Vec::Zero(0)), 4);
    REQUIRE(with.optimal());
    REQUIRE(without.optimal());
    CHECK(without.objective <= with.objective + 1e-12);
  }
}

TEST_CASE("stage and horizon cost") {
  CostSpec support{Role::Support, 0.3, {}};
  CHECK(stage_cost(v2(1, 1), support, v2(0, 0)) == 0.0);
  CostSpec insp{Role::Inspection, 0.5, v2(2, 0)};
  CHECK(stage_cost(v2(2, 0), insp, v2(0, 0)) == 0.0);
  CHECK(stage_cost(v2(0, 0), insp, v2(1, 0)) == doctest::Approx(1.0));

  // Quadratic form reproduces the summed stage costs at predicted positions.
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n01;
  HorizonParams hz;
  hz.steps = 3;
  hz.dim = 2;
  const Vec p0 = v2(0.2, -1.0);
  const QuadraticCost q = horizon_cost(p0, insp, hz);
  for (int trial = 0; trial < 20; ++trial) {
    Vec u(6);
    for (auto& x : u) x = n01(rng);
    double direct = 0.0;
    Vec pos = p0;
    for (int m = 0; m < 3; ++m) {
      direct += stage_cost(pos, insp, u.segment(2 * m, 2));
      pos += u.segment(2 * m, 2);
    }
    const double form = 0.5 * u.dot(q.hessian * u) + q.linear.dot(u) + q.constant;
    CHECK(form == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("local problem layout") {
  SUBCASE("support robot, no neighbours, one step") {
    const PlanningProblem p = problem(Role::Support, v2(0, 0), {}, 0.25, 1, v2(0.1, 0), 0.1, 0);
    const QuadraticProgram qp = build_local_problem(p, Vec::Zero(0), Vec::Zero(0), DualAscentParams{});
    CHECK(qp.size() == 2);
    CHECK(qp.hessian == 0.5 * Mat::Identity(2, 2));
  }
  SUBCASE("inspection robot at its POI rests") {
    std::vector<Vec> others{v2(3, 0)};
    const PlanningProblem p = problem(Role::Inspection, v2(1, 1), v2(1, 1), 0.1, 2, v2(0.2, 0.1), 0.1, 1, others);
    const QuadraticProgram qp = build_local_problem(p, Vec::Zero(1), Vec::Zero(1), DualAscentParams{});
    const LocalSolution s = solve_local(qp, 4);
    REQUIRE(s.optimal());
    CHECK(s.inputs.norm() <= 1e-12);
    CHECK(s.trades.norm() <= 1e-12);
  }
  SUBCASE("trade block expands the penalty") {
    const PlanningProblem p = problem(Role::Support, v2(0, 0), {}, 0.1, 1, v2(0, 0), 10.0, 1);
    DualAscentParams params;
    params.rho = 2.0;
    const QuadraticProgram qp = build_local_problem(p, Vec::Constant(1, 0.5), Vec::Constant(1, 1.0), params);
    // t*1 + (rho/2)(t + 0.5)^2 = t^2 + 2t + 0.5 + 0.5
    for (double t : {-1.0, 0.0, 0.3, 2.0}) {
      Vec x(3);
      x << 0.0, 0.0, t;
      CHECK(qp.objective(x) == doctest::Approx(t + (t + 0.5) * (t + 0.5) + 0.5).epsilon(1e-14));
    }
    CHECK(std::isinf(qp.box_hi(2)));
    CHECK(qp.box_hi(0) == 0.5);
    CHECK(qp.ineq_coeff(0, 2) == -1.0);
  }
  CHECK_THROWS_AS(build_local_problem(problem(Role::Support, v2(0, 0), {}, 0.1, 1, v2(0, 0), 1.0, 2),
                                      Vec::Zero(1), Vec::Zero(2), DualAscentParams{}),
                  DimensionError);
}

TEST_CASE("final problem moves trades to the right-hand side") {
  const PlanningProblem p = problem(Role::Support, v2(0, 0), {}, 0.1, 1, v2(1, 0), 0.08, 1);
  SUBCASE("zero trades equal the equal split") {
    const QuadraticProgram qp = build_final_problem(p, Vec::Zero(1));
    CHECK(qp.ineq_rhs(0) == doctest::Approx(0.08));
    CHECK(qp.ineq_coeff.row(0) == -v2(1, 0).transpose());
  }
  SUBCASE("bought budget relaxes the row") {
    const QuadraticProgram qp = build_final_problem(p, Vec::Constant(1, 0.02));
    CHECK(qp.ineq_rhs(0) == doctest::Approx(0.10).epsilon(1e-15));
  }
  SUBCASE("oversold budget forces a connectivity-raising move") {
    const QuadraticProgram qp = build_final_problem(p, Vec::Constant(1, -0.10));
    CHECK(qp.ineq_rhs(0) == doctest::Approx(-0.02).epsilon(1e-14));
    CHECK(qp.max_violation(Vec::Zero(2)) > 0.0);
    const LocalSolution s = solve_local(qp, 2);
    REQUIRE(s.optimal());
    CHECK(s.inputs(0) >= 0.02 - 1e-9);
  }
  CHECK_THROWS_AS(build_final_problem(p, Vec::Zero(3)), DimensionError);
}

TEST_CASE("minimal feasible net trade") {
  // Earnings m^T u at most 0.5 (box), so the threshold is -(slack + 0.5).
  const PlanningProblem p = problem(Role::Support, v2(0, 0), {}, 0.1, 1, v2(1, 0), 0.08, 2);
  const double th = min_feasible_net_trade(p);
  CHECK(th == doctest::Approx(-0.58).epsilon(1e-9));
  CHECK(solve_local(build_final_problem(p, Vec::Constant(2, th / 2 + 1e-9)), 2).optimal());
  CHECK_FALSE(solve_local(build_final_problem(p, Vec::Constant(2, th / 2 - 1e-6)), 2).optimal());

  PlanningProblem none = p;
  none.budget.coeff_u.resize(0, 2);
  none.budget.coeff_t.resize(0, 2);
  none.budget.rhs.resize(0);
  CHECK(std::isinf(min_feasible_net_trade(none)));
}

TEST_CASE("parameter validation") {
  DualAscentParams d;
  CHECK_NOTHROW(d.validate());
  d.rho = 0.0;
  CHECK_THROWS(d.validate());
  d = {};
  d.eta = -1.0;
  CHECK_THROWS(d.validate());
  d = {};
  d.max_rounds = 0;
  CHECK_THROWS(d.validate());
}
