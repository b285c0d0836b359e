#include "commplan/horizon_constraints.hpp"

#include <stdexcept>

#include "commplan/errors.hpp"

namespace commplan {

void HorizonParams::validate() const {
  if (steps < 1) throw std::invalid_argument("horizon steps must be >= 1");
  if (dim < 1) throw std::invalid_argument("dimension must be >= 1");
  if (!(u_max > 0.0)) throw std::invalid_argument("u_max must be > 0");
}

Mat cumulative_sum_matrix(int steps) {
  Mat l = Mat::Zero(steps, steps);
  l.triangularView<Eigen::Lower>().setOnes();
  return l;
}

Mat prediction_matrix(int steps, int dim) {
  if (steps < 1 || dim < 1) throw DimensionError("prediction matrix needs steps, dim >= 1");
  Mat b = Mat::Zero(steps * dim, steps * dim);
  for (int row = 0; row < steps; ++row) {
    for (int col = 0; col <= row; ++col) {
      b.block(row * dim, col * dim, dim, dim).setIdentity();
    }
  }
  return b;
}

Hyperplane separating_hyperplane(const Vec& p_i, const Vec& p_j, double r_i, double epsilon) {
  const Vec diff = p_j - p_i;
  const double dist = diff.norm();
  if (dist <= 1e-12) throw DegenerateGeometryError("separating hyperplane of coincident robots");
  Hyperplane h;
  h.normal = diff / dist;
  h.offset = 0.5 * h.normal.dot(p_i + p_j) - (r_i + 0.5 * epsilon);
  return h;
}

CollisionConstraint stack_collision(const Vec& p_i, double r_i, std::span<const Vec> others,
                                    double epsilon, const HorizonParams& horizon) {
  const int n = horizon.dim;
  const int m_steps = horizon.steps;
  const auto k = static_cast<Eigen::Index>(others.size());

  // C_i stacks one normal per neighbour; d_i - C_i p_i is the slack at rest.
  Mat c(k, n);
  Vec slack(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    const Hyperplane h = separating_hyperplane(p_i, others[static_cast<std::size_t>(j)], r_i, epsilon);
    c.row(j) = h.normal.transpose();
    slack(j) = h.offset - h.normal.dot(p_i);
  }

  // Row (j, m) constrains the position after m+1 steps, i.e. c_j^T sum_{l<=m} u_l.
  CollisionConstraint out;
  out.coeff = Mat::Zero(k * m_steps, horizon.input_size());
  out.rhs.resize(k * m_steps);
  for (Eigen::Index j = 0; j < k; ++j) {
    for (int m = 0; m < m_steps; ++m) {
      const Eigen::Index row = j * m_steps + m;
      for (int l = 0; l <= m; ++l) out.coeff.block(row, l * n, 1, n) = c.row(j);
      out.rhs(row) = slack(j);
    }
  }
  return out;
}

BudgetConstraint budget_constraint(const Vec& gradient, double lambda_hat, double lambda_lb,
                                   std::size_t n_robots, std::size_t n_neighbors,
                                   const HorizonParams& horizon) {
  if (gradient.size() != horizon.dim) throw DimensionError("gradient size must equal dimension");
  if (n_robots == 0) throw DimensionError("robot count must be >= 1");
  const int n = horizon.dim;
  const int m_steps = horizon.steps;

  BudgetConstraint out;
  out.coeff_u = Mat::Zero(m_steps, horizon.input_size());
  for (int row = 0; row < m_steps; ++row) {
    for (int col = 0; col <= row; ++col) out.coeff_u.block(row, col * n, 1, n) = gradient.transpose();
  }
  out.coeff_t = Mat::Ones(m_steps, static_cast<Eigen::Index>(n_neighbors));
  out.rhs = Vec::Constant(m_steps, (lambda_hat - lambda_lb) / static_cast<double>(n_robots));
  return out;
}

}  // namespace commplan
