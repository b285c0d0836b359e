#pragma once

#include <cstddef>
#include <span>

#include "commplan/link_model.hpp"

namespace commplan {

/// Symmetric hollow weight matrix with entries in [0,1].
class WeightedGraph {
 public:
  // Throws std::invalid_argument if the matrix is not square, symmetric,
  // hollow, or has entries outside [0,1].
  explicit WeightedGraph(Mat weights);

  // Adjacency from true positions: w_ij on edges, zero elsewhere.
  static WeightedGraph from_bodies(std::span<const RobotBody> bodies, const LinkParams& params);

  std::size_t size() const { return static_cast<std::size_t>(weights_.rows()); }
  const Mat& weights() const { return weights_; }
  double weight(std::size_t i, std::size_t j) const {
    return weights_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }

 private:
  Mat weights_;
};

Mat laplacian(const WeightedGraph& graph);

struct FiedlerResult {
  double value = 0.0;  // lambda_2
  Vec vector;          // unit norm, orthogonal to 1, first nonzero entry positive
  double gap = 0.0;    // lambda_3 - lambda_2, +inf when N == 2
};

// Gap below which lambda_2 is treated as repeated and its gradient as ill-defined.
inline constexpr double kFiedlerMultiplicityGap = 1e-9;

/// Second-smallest Laplacian eigenpair via a dense symmetric eigensolver.
/// Requires N >= 2. Throws NumericalError if the solver does not converge
/// or the eigen-residual exceeds 1e-8.
FiedlerResult fiedler(const WeightedGraph& graph);

// What robot i can see of a neighbour: its index and position.
struct NeighborView {
  std::size_t id = 0;
  Vec position;
};

/// dL/dp_{i,axis} for the logistic link model.
///
/// Only entries on rows/columns i and its neighbours are nonzero:
///   da_ij/dp_{i,r} = -alpha (1 - a_ij) a_ij (p_{i,r} - p_{j,r}) / |p_i - p_j|
/// and dD = diag(dA 1). Throws DegenerateGeometryError when a neighbour
/// coincides with p_i.
Mat laplacian_position_derivative(std::size_t n_robots, std::size_t i, const Vec& p_i,
                                  std::span<const NeighborView> nbrs, const LinkParams& params,
                                  std::size_t axis);

Mat laplacian_position_derivative(std::span<const RobotBody> bodies, const EdgeSet& edges,
                                  const LinkParams& params, std::size_t i, std::size_t axis);

struct FiedlerGradient {
  std::size_t robot = 0;
  Vec grad;  // m_i, one entry per spatial axis
};

/// m_i[r] = v2^T (dL/dp_{i,r}) v2, using whatever v2 is supplied (true or estimated).
FiedlerGradient fiedler_gradient(std::size_t i, const Vec& p_i, std::span<const NeighborView> nbrs,
                                 const LinkParams& params, const FiedlerResult& fiedler);

FiedlerGradient fiedler_gradient(std::span<const RobotBody> bodies, const EdgeSet& edges,
                                 const LinkParams& params, const FiedlerResult& fiedler,
                                 std::size_t i);

}  // namespace commplan
