#include "commplan/graph_connectivity.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "commplan/errors.hpp"

namespace commplan {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

std::vector<NeighborView> neighbor_views(std::span<const RobotBody> bodies, const EdgeSet& edges,
                                         std::size_t i) {
  std::vector<NeighborView> out;
  for (std::size_t j : neighbors(i, edges)) out.push_back({j, bodies[j].position});
  return out;
}

}  // namespace

WeightedGraph::WeightedGraph(Mat weights) : weights_(std::move(weights)) {
  if (weights_.rows() != weights_.cols()) throw std::invalid_argument("weight matrix must be square");
  const Eigen::Index n = weights_.rows();
  for (Eigen::Index r = 0; r < n; ++r) {
    if (weights_(r, r) != 0.0) throw std::invalid_argument("weight matrix must be hollow");
    for (Eigen::Index c = 0; c < n; ++c) {
      const double w = weights_(r, c);
      if (!(w >= 0.0 && w <= 1.0)) throw std::invalid_argument("weights must lie in [0,1]");
      if (w != weights_(c, r)) throw std::invalid_argument("weight matrix must be symmetric");
    }
  }
}

WeightedGraph WeightedGraph::from_bodies(std::span<const RobotBody> bodies,
                                         const LinkParams& params) {
  const auto n = idx(bodies.size());
  Mat w = Mat::Zero(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = a + 1; b < n; ++b) {
      const double v = adjacency_weight(bodies[a].position, bodies[b].position, params);
      w(a, b) = v;
      w(b, a) = v;
    }
  }
  return WeightedGraph(std::move(w));
}

Mat laplacian(const WeightedGraph& graph) {
  const Mat& a = graph.weights();
  Mat l = -a;
  l.diagonal() = a.rowwise().sum();
  return l;
}

FiedlerResult fiedler(const WeightedGraph& graph) {
  const std::size_t n = graph.size();
  if (n < 2) throw std::invalid_argument("Fiedler value needs at least two robots");

  const Mat l = laplacian(graph);
  Eigen::SelfAdjointEigenSolver<Mat> solver(l);
  if (solver.info() != Eigen::Success) throw NumericalError("Laplacian eigensolver did not converge");

  const Vec& values = solver.eigenvalues();
  const Mat& vectors = solver.eigenvectors();

  FiedlerResult out;
  out.value = values(1);
  out.gap = n > 2 ? values(2) - values(1) : std::numeric_limits<double>::infinity();

  // Within a repeated zero eigenvalue the solver may hand back any basis of the
  // null space; projecting out 1 keeps the returned vector orthogonal to it.
  Vec v = vectors.col(1);
  v.array() -= v.mean();
  if (v.norm() < 1e-6) {
    v = vectors.col(0);
    v.array() -= v.mean();
  }
  v.normalize();

  for (Eigen::Index r = 0; r < v.size(); ++r) {
    if (std::abs(v(r)) > 1e-9) {
      if (v(r) < 0.0) v = -v;
      break;
    }
  }

  if (out.value < 0.0) out.value = 0.0;  // round-off below the zero eigenvalue
  const double residual = (l * v - out.value * v).norm();
  if (residual > 1e-8) {
    throw NumericalError("Fiedler eigen-residual " + std::to_string(residual) + " exceeds 1e-8");
  }
  out.vector = std::move(v);
  return out;
}

Mat laplacian_position_derivative(std::size_t n_robots, std::size_t i, const Vec& p_i,
                                  std::span<const NeighborView> nbrs, const LinkParams& params,
                                  std::size_t axis) {
  if (axis >= static_cast<std::size_t>(p_i.size())) throw DimensionError("axis out of range");
  Mat dl = Mat::Zero(idx(n_robots), idx(n_robots));
  for (const auto& nb : nbrs) {
    const Vec diff = p_i - nb.position;
    const double dist = diff.norm();
    if (dist <= 1e-12) {
      throw DegenerateGeometryError("robots " + std::to_string(i) + " and " +
                                    std::to_string(nb.id) + " coincide");
    }
    const double a = link_weight_at_distance(dist, params);
    const double da = link_weight_slope(a, params) * diff(idx(axis)) / dist;
    const Eigen::Index r = idx(i);
    const Eigen::Index c = idx(nb.id);
    // dL = dD - dA with dD = diag(dA 1)
    dl(r, c) -= da;
    dl(c, r) -= da;
    dl(r, r) += da;
    dl(c, c) += da;
  }
  return dl;
}

Mat laplacian_position_derivative(std::span<const RobotBody> bodies, const EdgeSet& edges,
                                  const LinkParams& params, std::size_t i, std::size_t axis) {
  const auto nbrs = neighbor_views(bodies, edges, i);
  return laplacian_position_derivative(bodies.size(), i, bodies[i].position, nbrs, params, axis);
}

FiedlerGradient fiedler_gradient(std::size_t i, const Vec& p_i, std::span<const NeighborView> nbrs,
                                 const LinkParams& params, const FiedlerResult& fiedler) {
  const auto n_robots = static_cast<std::size_t>(fiedler.vector.size());
  FiedlerGradient out{i, Vec::Zero(p_i.size())};
  for (Eigen::Index r = 0; r < p_i.size(); ++r) {
    const Mat dl = laplacian_position_derivative(n_robots, i, p_i, nbrs, params,
                                                 static_cast<std::size_t>(r));
    out.grad(r) = fiedler.vector.dot(dl * fiedler.vector);
  }
  return out;
}

FiedlerGradient fiedler_gradient(std::span<const RobotBody> bodies, const EdgeSet& edges,
                                 const LinkParams& params, const FiedlerResult& fiedler,
                                 std::size_t i) {
  const auto nbrs = neighbor_views(bodies, edges, i);
  return fiedler_gradient(i, bodies[i].position, nbrs, params, fiedler);
}

}  // namespace commplan
