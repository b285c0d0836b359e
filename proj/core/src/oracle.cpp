#include "commplan/oracle.hpp"

#include <limits>

namespace commplan {

Snapshot make_snapshot(const ScenarioConfig& config, std::span<const Vec> positions) {
  Snapshot s;
  s.positions.assign(positions.begin(), positions.end());
  s.gradients.assign(positions.size(), Vec::Zero(config.dim));
  if (positions.size() < 2) return s;

  const auto bodies = bodies_of(config, positions);
  const EdgeSet edges = edge_set(bodies, config.link);
  s.fiedler = fiedler(WeightedGraph::from_bodies(bodies, config.link));
  s.lambda2 = s.fiedler.value;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    s.gradients[i] = fiedler_gradient(bodies, edges, config.link, s.fiedler, i).grad;
  }
  return s;
}

OracleResult centralized_oracle(const ScenarioConfig& config, const Snapshot& snapshot) {
  const std::size_t n = snapshot.positions.size();
  HorizonParams horizon = config.horizon;
  horizon.dim = config.dim;
  const Eigen::Index nu = horizon.input_size();
  const Eigen::Index nx = nu * static_cast<Eigen::Index>(n);
  const Eigen::Index steps = horizon.steps;

  QuadraticProgram qp;
  qp.hessian = Mat::Zero(nx, nx);
  qp.linear = Vec::Zero(nx);
  qp.box_lo = Vec::Constant(nx, -horizon.u_max);
  qp.box_hi = Vec::Constant(nx, horizon.u_max);

  std::vector<CollisionConstraint> collisions;
  Eigen::Index rows = n >= 2 ? steps : 0;
  for (std::size_t i = 0; i < n; ++i) {
    CostSpec cost{config.robots[i].role, config.robots[i].h, config.robots[i].poi};
    const QuadraticCost q = horizon_cost(snapshot.positions[i], cost, horizon);
    const Eigen::Index off = nu * static_cast<Eigen::Index>(i);
    qp.hessian.block(off, off, nu, nu) = q.hessian;
    qp.linear.segment(off, nu) = q.linear;
    qp.constant += q.constant;

    std::vector<Vec> others;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) others.push_back(snapshot.positions[j]);
    collisions.push_back(
        stack_collision(snapshot.positions[i], config.robots[i].radius, others, config.epsilon, horizon));
    rows += collisions.back().rows();
  }

  qp.ineq_coeff = Mat::Zero(rows, nx);
  qp.ineq_rhs = Vec::Zero(rows);
  Eigen::Index r = 0;
  if (n >= 2) {
    for (std::size_t i = 0; i < n; ++i) {
      const BudgetConstraint b =
          budget_constraint(snapshot.gradients[i], snapshot.lambda2, config.lambda_lb, n, 0, horizon);
      qp.ineq_coeff.block(0, nu * static_cast<Eigen::Index>(i), steps, nu) = -b.coeff_u;
    }
    qp.ineq_rhs.head(steps).setConstant(snapshot.lambda2 - config.lambda_lb);
    r = steps;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto& c = collisions[i];
    qp.ineq_coeff.block(r, nu * static_cast<Eigen::Index>(i), c.rows(), nu) = c.coeff;
    qp.ineq_rhs.segment(r, c.rows()) = c.rhs;
    r += c.rows();
  }

  const QpResult res = solve_qp(qp);
  OracleResult out;
  out.status = res.status;
  out.objective = res.objective;
  for (std::size_t i = 0; i < n; ++i) out.inputs.push_back(res.x.segment(nu * static_cast<Eigen::Index>(i), nu));
  return out;
}

GroundTruth ground_truth_metrics(std::span<const Vec> positions, const LinkParams& link) {
  GroundTruth g;
  g.min_distance = std::numeric_limits<double>::infinity();
  std::vector<RobotBody> bodies;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    bodies.push_back({i, positions[i], 0.0});
    for (std::size_t j = i + 1; j < positions.size(); ++j)
      g.min_distance = std::min(g.min_distance, (positions[i] - positions[j]).norm());
  }
  if (positions.size() >= 2) g.lambda2 = fiedler(WeightedGraph::from_bodies(bodies, link)).value;
  return g;
}

}  // namespace commplan
