#pragma once

#include <string_view>

#include "commplan/link_model.hpp"

namespace commplan {

/// minimize   1/2 x^T H x + g^T x + c
/// subject to A x <= b,  lo <= x <= hi
///
/// Infinite bounds are allowed and simply omitted.
struct QuadraticProgram {
  Mat hessian;
  Vec linear;
  double constant = 0.0;
  Mat ineq_coeff;
  Vec ineq_rhs;
  Vec box_lo;
  Vec box_hi;

  Eigen::Index size() const { return linear.size(); }
  // Throws DimensionError on inconsistent shapes or box_lo > box_hi.
  void validate() const;
  double objective(const Vec& x) const;
  // Largest violation of any row or bound at x (0 when feasible).
  double max_violation(const Vec& x) const;
};

enum class SolveStatus { Optimal, Infeasible, MaxIterations };

std::string_view to_string(SolveStatus status);

struct QpOptions {
  int max_iterations = 0;        // 0 picks a limit from the problem size
  double feasibility_tol = 1e-11;
  // Added to the diagonal only when H is numerically singular.
  double regularization = 1e-10;
};

struct QpResult {
  Vec x;
  double objective = 0.0;
  SolveStatus status = SolveStatus::Infeasible;
  Vec row_multipliers;  // >= 0, one per ineq row
  Vec lower_multipliers; // >= 0, one per variable
  Vec upper_multipliers; // >= 0, one per variable
  int iterations = 0;
  bool regularized = false;

  bool optimal() const { return status == SolveStatus::Optimal; }
};

/// Dense dual active-set solver (Goldfarb-Idnani). Deterministic: identical
/// inputs give bitwise identical outputs.
QpResult solve_qp(const QuadraticProgram& problem, const QpOptions& options = {});

// Norm of H x + g + A^T y + z_hi - z_lo; used by tests and diagnostics.
double stationarity_residual(const QuadraticProgram& problem, const QpResult& result);

}  // namespace commplan
