#pragma once

#include <limits>

#include "commplan/horizon_constraints.hpp"
#include "commplan/qp_solver.hpp"

namespace commplan {

enum class Role { Inspection, Support };

/// Per-robot stage cost.
///   inspection: 1/2 |p_poi - (p + u)|^2 + h |u|^2
///   support:    h |u|^2
/// Over a horizon the stage at step m is charged at the predicted position
/// p + u_0 + ... + u_{m-1}.
struct CostSpec {
  Role role = Role::Support;
  double h = 0.0;
  Vec poi;  // only read for inspection robots
};

double stage_cost(const Vec& position, const CostSpec& cost, const Vec& u);

// Quadratic form of the summed horizon cost in the stacked inputs U.
struct QuadraticCost {
  Mat hessian;
  Vec linear;
  double constant = 0.0;
};
QuadraticCost horizon_cost(const Vec& position, const CostSpec& cost, const HorizonParams& horizon);

struct DualAscentParams {
  double rho = 1.0;
  double eta = 1e-3;
  int max_rounds = 500;
  double trade_cap = std::numeric_limits<double>::infinity();  // |t_ij| bound, off by default

  void validate() const;
};

/// Everything a robot freezes at the start of an optimisation period.
struct PlanningProblem {
  Vec position;
  CostSpec cost;
  HorizonParams horizon;
  BudgetConstraint budget;       // may have zero rows when budget is not enforced
  CollisionConstraint collision;

  Eigen::Index num_trades() const { return budget.coeff_t.cols(); }
};

struct LocalSolution {
  Vec inputs;  // U_i, n M entries
  Vec trades;  // t_i, one per neighbour (empty for the final solve)
  double objective = 0.0;
  SolveStatus status = SolveStatus::Infeasible;

  bool optimal() const { return status == SolveStatus::Optimal; }
};

/// Decision vector (U_i, t_i); cost sum_m f + mu^T (t + s) + rho/2 |t + s|^2
/// where s are the neighbours' previous trades.
QuadraticProgram build_local_problem(const PlanningProblem& problem, const Vec& neighbor_trades_prev,
                                     const Vec& multipliers, const DualAscentParams& params);

/// Decision vector U_i only; the fixed trades move to the budget right-hand side.
QuadraticProgram build_final_problem(const PlanningProblem& problem, const Vec& fixed_trades);

/// Smallest net trade sum_j t_ij for which the final problem is feasible,
/// found by maximising the robot's own connectivity earnings. -inf without
/// budget rows; NaN when box and collision rows alone are infeasible.
double min_feasible_net_trade(const PlanningProblem& problem);

// Splits the QP solution into inputs and trades.
LocalSolution solve_local(const QuadraticProgram& qp, Eigen::Index num_inputs,
                          const QpOptions& options = {});

}  // namespace commplan
