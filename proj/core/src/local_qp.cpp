#include "commplan/local_qp.hpp"

#include <stdexcept>

#include "commplan/errors.hpp"

namespace commplan {

double stage_cost(const Vec& position, const CostSpec& cost, const Vec& u) {
  double c = cost.h * u.squaredNorm();
  if (cost.role == Role::Inspection) c += 0.5 * (cost.poi - (position + u)).squaredNorm();
  return c;
}

QuadraticCost horizon_cost(const Vec& position, const CostSpec& cost, const HorizonParams& horizon) {
  const Eigen::Index size = horizon.input_size();
  QuadraticCost q;
  q.hessian = 2.0 * cost.h * Mat::Identity(size, size);
  q.linear = Vec::Zero(size);
  if (cost.role == Role::Inspection) {
    if (cost.poi.size() != position.size()) throw DimensionError("POI dimension mismatch");
    const Mat b = prediction_matrix(horizon.steps, horizon.dim);
    const Vec gap = (cost.poi - position).replicate(horizon.steps, 1);
    q.hessian += b.transpose() * b;
    q.linear -= b.transpose() * gap;
    q.constant = 0.5 * gap.squaredNorm();
  }
  return q;
}

void DualAscentParams::validate() const {
  if (!(rho > 0.0)) throw std::invalid_argument("rho must be > 0");
  if (!(eta > 0.0)) throw std::invalid_argument("eta must be > 0");
  if (max_rounds < 1) throw std::invalid_argument("max_rounds must be >= 1");
  if (!(trade_cap > 0.0)) throw std::invalid_argument("trade_cap must be > 0");
}

namespace {

void check_shapes(const PlanningProblem& p) {
  const Eigen::Index nu = p.horizon.input_size();
  if (p.position.size() != p.horizon.dim) throw DimensionError("position dimension mismatch");
  if (p.budget.coeff_u.rows() > 0 && p.budget.coeff_u.cols() != nu)
    throw DimensionError("budget width mismatch");
  if (p.budget.coeff_t.rows() != p.budget.coeff_u.rows() || p.budget.rhs.size() != p.budget.coeff_u.rows())
    throw DimensionError("budget row count mismatch");
  if (p.collision.coeff.rows() > 0 && p.collision.coeff.cols() != nu)
    throw DimensionError("collision width mismatch");
  if (p.collision.rhs.size() != p.collision.coeff.rows()) throw DimensionError("collision rhs mismatch");
}

}  // namespace

QuadraticProgram build_local_problem(const PlanningProblem& problem, const Vec& neighbor_trades_prev,
                                     const Vec& multipliers, const DualAscentParams& params) {
  check_shapes(problem);
  const Eigen::Index nu = problem.horizon.input_size();
  const Eigen::Index nt = problem.num_trades();
  if (neighbor_trades_prev.size() != nt || multipliers.size() != nt)
    throw DimensionError("trade vector length must equal neighbour count");

  const QuadraticCost cost = horizon_cost(problem.position, problem.cost, problem.horizon);
  const Eigen::Index nx = nu + nt;
  const double rho = params.rho;

  QuadraticProgram qp;
  qp.hessian = Mat::Zero(nx, nx);
  qp.hessian.topLeftCorner(nu, nu) = cost.hessian;
  qp.hessian.bottomRightCorner(nt, nt) = rho * Mat::Identity(nt, nt);
  qp.linear.resize(nx);
  qp.linear.head(nu) = cost.linear;
  qp.linear.tail(nt) = multipliers + rho * neighbor_trades_prev;
  qp.constant = cost.constant + multipliers.dot(neighbor_trades_prev) +
                0.5 * rho * neighbor_trades_prev.squaredNorm();

  const Eigen::Index nb = problem.budget.rhs.size();
  const Eigen::Index nc = problem.collision.rows();
  qp.ineq_coeff = Mat::Zero(nb + nc, nx);
  qp.ineq_rhs.resize(nb + nc);
  if (nb > 0) {
    qp.ineq_coeff.block(0, 0, nb, nu) = -problem.budget.coeff_u;
    qp.ineq_coeff.block(0, nu, nb, nt) = -problem.budget.coeff_t;
    qp.ineq_rhs.head(nb) = problem.budget.rhs;
  }
  if (nc > 0) {
    qp.ineq_coeff.block(nb, 0, nc, nu) = problem.collision.coeff;
    qp.ineq_rhs.tail(nc) = problem.collision.rhs;
  }

  qp.box_lo.resize(nx);
  qp.box_hi.resize(nx);
  qp.box_lo.head(nu).setConstant(-problem.horizon.u_max);
  qp.box_hi.head(nu).setConstant(problem.horizon.u_max);
  qp.box_lo.tail(nt).setConstant(-params.trade_cap);
  qp.box_hi.tail(nt).setConstant(params.trade_cap);
  return qp;
}

QuadraticProgram build_final_problem(const PlanningProblem& problem, const Vec& fixed_trades) {
  check_shapes(problem);
  if (fixed_trades.size() != problem.num_trades())
    throw DimensionError("fixed trade vector length must equal neighbour count");
  const Eigen::Index nu = problem.horizon.input_size();
  const QuadraticCost cost = horizon_cost(problem.position, problem.cost, problem.horizon);

  QuadraticProgram qp;
  qp.hessian = cost.hessian;
  qp.linear = cost.linear;
  qp.constant = cost.constant;

  const Eigen::Index nb = problem.budget.rhs.size();
  const Eigen::Index nc = problem.collision.rows();
  qp.ineq_coeff = Mat::Zero(nb + nc, nu);
  qp.ineq_rhs.resize(nb + nc);
  if (nb > 0) {
    qp.ineq_coeff.topRows(nb) = -problem.budget.coeff_u;
    qp.ineq_rhs.head(nb) = problem.budget.rhs + problem.budget.coeff_t * fixed_trades;
  }
  if (nc > 0) {
    qp.ineq_coeff.bottomRows(nc) = problem.collision.coeff;
    qp.ineq_rhs.tail(nc) = problem.collision.rhs;
  }
  qp.box_lo = Vec::Constant(nu, -problem.horizon.u_max);
  qp.box_hi = Vec::Constant(nu, problem.horizon.u_max);
  return qp;
}

double min_feasible_net_trade(const PlanningProblem& problem) {
  check_shapes(problem);
  const Eigen::Index nb = problem.budget.rhs.size();
  if (nb == 0) return -std::numeric_limits<double>::infinity();
  const Eigen::Index nu = problem.horizon.input_size();
  const Eigen::Index nc = problem.collision.rows();

  // min s  s.t.  -M U - b <= s 1, collision rows, box. The small quadratic
  // keeps the solver's Hessian positive definite.
  constexpr double kWeight = 1e-6;
  QuadraticProgram qp;
  qp.hessian = kWeight * Mat::Identity(nu + 1, nu + 1);
  qp.linear = Vec::Zero(nu + 1);
  qp.linear(nu) = 1.0;
  qp.ineq_coeff = Mat::Zero(nb + nc, nu + 1);
  qp.ineq_rhs.resize(nb + nc);
  qp.ineq_coeff.block(0, 0, nb, nu) = -problem.budget.coeff_u;
  qp.ineq_coeff.block(0, nu, nb, 1).setConstant(-1.0);
  qp.ineq_rhs.head(nb) = problem.budget.rhs;
  if (nc > 0) {
    qp.ineq_coeff.block(nb, 0, nc, nu) = problem.collision.coeff;
    qp.ineq_rhs.tail(nc) = problem.collision.rhs;
  }
  qp.box_lo = Vec::Constant(nu + 1, -problem.horizon.u_max);
  qp.box_hi = Vec::Constant(nu + 1, problem.horizon.u_max);
  qp.box_lo(nu) = -std::numeric_limits<double>::infinity();
  qp.box_hi(nu) = std::numeric_limits<double>::infinity();

  const QpResult res = solve_qp(qp);
  if (!res.optimal()) return std::numeric_limits<double>::quiet_NaN();
  // The earnings at the returned inputs fix the exact level.
  const Vec lhs = -problem.budget.coeff_u * res.x.head(nu) - problem.budget.rhs;
  return lhs.maxCoeff();
}

LocalSolution solve_local(const QuadraticProgram& qp, Eigen::Index num_inputs, const QpOptions& options) {
  if (num_inputs > qp.size()) throw DimensionError("input count exceeds decision vector");
  const QpResult res = solve_qp(qp, options);
  LocalSolution out;
  out.status = res.status;
  out.objective = res.objective;
  out.inputs = res.x.head(num_inputs);
  out.trades = res.x.tail(qp.size() - num_inputs);
  return out;
}

}  // namespace commplan
