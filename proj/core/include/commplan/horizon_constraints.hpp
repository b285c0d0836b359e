#pragma once

#include <cstddef>
#include <span>

#include "commplan/link_model.hpp"

namespace commplan {

// Only the infinity norm keeps the per-step input bound a box, so it is the
// only one accepted.
enum class InputNorm { Infinity };

struct HorizonParams {
  int steps = 1;      // M
  int dim = 2;        // n
  double u_max = 1.0; // per-step, per-axis input bound
  InputNorm norm = InputNorm::Infinity;

  void validate() const;
  Eigen::Index input_size() const { return static_cast<Eigen::Index>(steps) * dim; }
};

// B = L_M (x) I_n; maps stacked inputs to stacked position offsets.
Mat prediction_matrix(int steps, int dim);

// Lower-triangular matrix of ones.
Mat cumulative_sum_matrix(int steps);

struct Hyperplane {
  Vec normal;  // unit vector from p_i toward p_j
  double offset = 0.0;
};

/// Half-space {x : normal^T x <= offset} for robot i against robot j, midway
/// between the two and pulled back by r_i + epsilon / 2.
Hyperplane separating_hyperplane(const Vec& p_i, const Vec& p_j, double r_i, double epsilon);

struct CollisionConstraint {
  Mat coeff;  // (M * |N_i|) x (n M)
  Vec rhs;

  Eigen::Index rows() const { return coeff.rows(); }
};

/// Stacked hyperplane rows over the horizon, ordered by ascending neighbour
/// (the order of `others`) and then by step.
CollisionConstraint stack_collision(const Vec& p_i, double r_i, std::span<const Vec> others,
                                    double epsilon, const HorizonParams& horizon);

/// Budget rows  -coeff_u U - coeff_t t <= rhs.
struct BudgetConstraint {
  Mat coeff_u;  // M x (n M), L_M (x) m_i^T
  Mat coeff_t;  // M x |N_i|, all ones
  Vec rhs;      // (lambda_hat - lambda_lb) / N replicated

  Vec lhs(const Vec& inputs, const Vec& trades) const { return -coeff_u * inputs - coeff_t * trades; }
};

BudgetConstraint budget_constraint(const Vec& gradient, double lambda_hat, double lambda_lb,
                                   std::size_t n_robots, std::size_t n_neighbors,
                                   const HorizonParams& horizon);

}  // namespace commplan
