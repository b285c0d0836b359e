#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace commplan {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Logistic link-quality model.
///
/// The weight between two robots at distance d is
///   w(d) = exp(-alpha (d - d50)) / (1 + exp(-alpha (d - d50)))
/// and a communication edge exists when w(d) >= w_min.
struct LinkParams {
  double d50 = 1.0;    // distance of 50% link quality [m]
  double alpha = 1.0;  // steepness, four times the attenuation rate at d50 [1/m]
  double w_min = 0.05; // edge-existence threshold

  // Throws std::invalid_argument naming the first offending field.
  void validate() const;
};

struct RobotBody {
  std::size_t id = 0;
  Vec position;
  double radius = 0.0;
};

double link_weight_at_distance(double distance, const LinkParams& params);
double link_weight(const Vec& p_i, const Vec& p_j, const LinkParams& params);

// dw/dd expressed through the weight itself: -alpha (1 - w) w.
double link_weight_slope(double weight, const LinkParams& params);

// Weight entering the adjacency matrix: w if {i,j} is an edge, else 0.
double adjacency_weight(const Vec& p_i, const Vec& p_j, const LinkParams& params);

/// Undirected edge set over robot indices. Pairs are stored as (min, max)
/// and kept sorted so iteration order is deterministic.
class EdgeSet {
 public:
  EdgeSet() = default;
  explicit EdgeSet(std::vector<std::pair<std::size_t, std::size_t>> pairs);

  bool contains(std::size_t i, std::size_t j) const;
  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }
  const std::vector<std::pair<std::size_t, std::size_t>>& pairs() const { return pairs_; }

  friend bool operator==(const EdgeSet&, const EdgeSet&) = default;

 private:
  std::vector<std::pair<std::size_t, std::size_t>> pairs_;
};

EdgeSet edge_set(std::span<const RobotBody> bodies, const LinkParams& params);

// Ascending-sorted neighbours of robot i.
std::vector<std::size_t> neighbors(std::size_t i, const EdgeSet& edges);

}  // namespace commplan
