#include <doctest.h>

#include <random>

#include "commplan/errors.hpp"
#include "commplan/horizon_constraints.hpp"
#include "oracles.hpp"

using namespace commplan;

namespace {

Vec v2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

HorizonParams horizon(int steps, int dim = 2, double u_max = 1.0) {
  HorizonParams h;
  h.steps = steps;
  h.dim = dim;
  h.u_max = u_max;
  return h;
}

}  // namespace

TEST_CASE("prediction matrix structure") {
  Mat m21(2, 2);
  m21 << 1, 0, 1, 1;
  CHECK(prediction_matrix(2, 1) == m21);
  CHECK(prediction_matrix(1, 3) == Mat::Identity(3, 3));
  CHECK(cumulative_sum_matrix(3) == prediction_matrix(3, 1));

  Vec u = Vec::Zero(6);
  u.head(2) = v2(0.3, -0.2);
  const Vec offsets = prediction_matrix(3, 2) * u;
  for (int m = 0; m < 3; ++m) CHECK(offsets.segment(2 * m, 2) == v2(0.3, -0.2));

  std::mt19937_64 rng(1);
  std::normal_distribution<double> n01;
  Vec w(8);
  for (auto& x : w) x = n01(rng);
  const Vec p = prediction_matrix(4, 2) * w;
  Vec acc = Vec::Zero(2);
  for (int m = 0; m < 4; ++m) {
    acc += w.segment(2 * m, 2);
    CHECK((p.segment(2 * m, 2) - acc).norm() <= 1e-15);
  }
}

TEST_CASE("separating hyperplane") {
  const Hyperplane h = separating_hyperplane(v2(0, 0), v2(2, 0), 0.5, 0.2);
  CHECK(h.normal == v2(1, 0));
  CHECK(h.offset == doctest::Approx(0.4).epsilon(1e-15));
  const Hyperplane back = separating_hyperplane(v2(2, 0), v2(0, 0), 0.5, 0.2);
  CHECK(back.normal == -h.normal);
  CHECK_THROWS_AS(separating_hyperplane(v2(1, 1), v2(1, 1), 0.5, 0.2), DegenerateGeometryError);
}

TEST_CASE("stacked collision rows") {
  SUBCASE("one neighbour, one step") {
    const std::vector<Vec> others{v2(2, 0)};
    const CollisionConstraint c = stack_collision(v2(0, 0), 0.5, others, 0.2, horizon(1));
    REQUIRE(c.rows() == 1);
    CHECK(c.coeff.row(0) == v2(1, 0).transpose());
    CHECK(c.rhs(0) == doctest::Approx(0.4));
    CHECK(c.rhs(0) > 0.0);
  }
  SUBCASE("no neighbours") {
    const CollisionConstraint c = stack_collision(v2(0, 0), 0.5, {}, 0.2, horizon(3));
    CHECK(c.rows() == 0);
    CHECK(c.coeff.cols() == 6);
  }
  SUBCASE("second step acts on the cumulative input") {
    const std::vector<Vec> others{v2(1, 2)};
    const CollisionConstraint c = stack_collision(v2(0, 0), 0.3, others, 0.2, horizon(2));
    REQUIRE(c.rows() == 2);
    CHECK(c.coeff.block(1, 0, 1, 2) == c.coeff.block(0, 0, 1, 2));
    CHECK(c.coeff.block(1, 2, 1, 2) == c.coeff.block(0, 0, 1, 2));
    CHECK(c.coeff.block(0, 2, 1, 2).isZero(0.0));
    CHECK(c.rhs(0) == c.rhs(1));
  }
  SUBCASE("rows ordered by neighbour then step, unit normals, rest strictly feasible") {
    const std::vector<Vec> others{v2(3, 0), v2(0, -2), v2(-1, 1)};
    const CollisionConstraint c = stack_collision(v2(0, 0), 0.2, others, 0.1, horizon(3));
    REQUIRE(c.rows() == 9);
    for (Eigen::Index j = 0; j < 3; ++j) {
      const Vec normal = (others[static_cast<std::size_t>(j)] / others[static_cast<std::size_t>(j)].norm());
      CHECK((c.coeff.block(j * 3, 0, 1, 2).transpose() - normal).norm() <= 1e-15);
      for (int m = 0; m < 3; ++m) CHECK(c.rhs(j * 3 + m) > 0.0);
    }
  }
}

TEST_CASE("budget rows") {
  SUBCASE("single step substitution") {
    const BudgetConstraint b = budget_constraint(v2(1, 0), 1.0, 0.2, 10, 2, horizon(1));
    CHECK(b.coeff_u == v2(1, 0).transpose());
    CHECK(b.coeff_t == Mat::Ones(1, 2));
    CHECK(b.rhs(0) == doctest::Approx(0.08).epsilon(1e-15));
    // -u_x - sum t <= 0.08
    Vec t(2);
    t << 0.01, 0.02;
    CHECK(b.lhs(v2(0.5, 7.0), t)(0) == doctest::Approx(-0.53));
  }
  SUBCASE("zero gradient leaves only trades") {
    const BudgetConstraint b = budget_constraint(v2(0, 0), 1.0, 0.2, 10, 3, horizon(2));
    CHECK(b.coeff_u.isZero(0.0));
    CHECK(b.coeff_t == Mat::Ones(2, 3));
  }
  SUBCASE("two steps accumulate the gradient") {
    const BudgetConstraint b = budget_constraint(v2(1, 0), 1.0, 0.2, 10, 1, horizon(2));
    Mat expected(2, 4);
    expected << 1, 0, 0, 0, 1, 0, 1, 0;
    CHECK(b.coeff_u == expected);
    CHECK(b.rhs == Vec::Constant(2, 0.08));
  }
  SUBCASE("negative slack is passed through") {
    const BudgetConstraint b = budget_constraint(v2(1, 0), 0.1, 0.2, 2, 0, horizon(1));
    CHECK(b.rhs(0) < 0.0);
  }
  CHECK_THROWS_AS(budget_constraint(Vec::Zero(3), 1.0, 0.2, 10, 1, horizon(1)), DimensionError);
}

TEST_CASE("summed budget rows with antisymmetric trades give the global row") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> n01;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 3 + trial % 5;
    const HorizonParams hz = horizon(1 + trial % 3);
    // complete trading graph
    Mat t = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        t(i, j) = n01(rng) * 0.1;
        t(j, i) = -t(i, j);
      }
    const double lambda_hat = 1.3, lambda_lb = 0.4;
    Vec sum_rows = Vec::Zero(hz.steps);
    Vec global = Vec::Zero(hz.steps);
    Vec rhs = Vec::Zero(hz.steps);
    for (int i = 0; i < n; ++i) {
      Vec g(2), u(hz.input_size());
      g << n01(rng), n01(rng);
      for (auto& x : u) x = n01(rng);
      const BudgetConstraint b =
          budget_constraint(g, lambda_hat, lambda_lb, static_cast<std::size_t>(n), static_cast<std::size_t>(n - 1), hz);
      Vec ti(n - 1);
      for (int j = 0, a = 0; j < n; ++j)
        if (j != i) ti(a++) = t(i, j);
      sum_rows += b.lhs(u, ti);
      global -= b.coeff_u * u;
      rhs += b.rhs;
    }
    CHECK((sum_rows - global).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((rhs.array() - (lambda_hat - lambda_lb)).abs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("paired half-spaces keep sampled waypoints apart") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-6, 6);
  std::uniform_real_distribution<double> r(0.05, 0.8);
  int samples = 0;
  while (samples < 10000) {
    const Vec pi = v2(u(rng), u(rng)), pj = v2(u(rng), u(rng));
    const double ri = r(rng), rj = r(rng), eps = r(rng) * 0.5;
    if ((pi - pj).norm() < ri + rj + eps + 1e-6) continue;
    const Hyperplane hi = separating_hyperplane(pi, pj, ri, eps);
    const Hyperplane hj = separating_hyperplane(pj, pi, rj, eps);
    const Vec x = v2(u(rng), u(rng)), y = v2(u(rng), u(rng));
    if (hi.normal.dot(x) > hi.offset || hj.normal.dot(y) > hj.offset) continue;
    ++samples;
    CHECK((x - y).norm() >= ri + rj + eps - 1e-12);
  }
}

TEST_CASE("zero input with zero trades satisfies the budget when the estimate is above the bound") {
  const BudgetConstraint b = budget_constraint(v2(0.3, -2.0), 0.9, 0.5, 4, 3, horizon(3));
  CHECK(b.lhs(Vec::Zero(6), Vec::Zero(3)).maxCoeff() <= 0.0);
  CHECK((b.lhs(Vec::Zero(6), Vec::Zero(3)).array() <= b.rhs.array()).all());
}
