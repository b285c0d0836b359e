#include "commplan/link_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace commplan {

void LinkParams::validate() const {
  if (!(d50 > 0.0)) throw std::invalid_argument("d50 must be > 0");
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be > 0");
  if (!(w_min > 0.0 && w_min < 1.0)) throw std::invalid_argument("w_min must lie in (0,1)");
}

double link_weight_at_distance(double distance, const LinkParams& params) {
  // 1 / (1 + e^{x}) is the same logistic without overflow for large x.
  const double x = params.alpha * (distance - params.d50);
  return 1.0 / (1.0 + std::exp(x));
}

double link_weight(const Vec& p_i, const Vec& p_j, const LinkParams& params) {
  return link_weight_at_distance((p_i - p_j).norm(), params);
}

double link_weight_slope(double weight, const LinkParams& params) {
  return -params.alpha * (1.0 - weight) * weight;
}

double adjacency_weight(const Vec& p_i, const Vec& p_j, const LinkParams& params) {
  const double w = link_weight(p_i, p_j, params);
  return w >= params.w_min ? w : 0.0;
}

EdgeSet::EdgeSet(std::vector<std::pair<std::size_t, std::size_t>> pairs) {
  for (auto& [a, b] : pairs) {
    if (a == b) throw std::invalid_argument("edge set cannot contain self-pairs");
    if (a > b) std::swap(a, b);
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  pairs_ = std::move(pairs);
}

bool EdgeSet::contains(std::size_t i, std::size_t j) const {
  if (i > j) std::swap(i, j);
  return std::binary_search(pairs_.begin(), pairs_.end(), std::make_pair(i, j));
}

EdgeSet edge_set(std::span<const RobotBody> bodies, const LinkParams& params) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < bodies.size(); ++a) {
    for (std::size_t b = a + 1; b < bodies.size(); ++b) {
      if (link_weight(bodies[a].position, bodies[b].position, params) >= params.w_min) {
        pairs.emplace_back(bodies[a].id, bodies[b].id);
      }
    }
  }
  return EdgeSet(std::move(pairs));
}

std::vector<std::size_t> neighbors(std::size_t i, const EdgeSet& edges) {
  std::vector<std::size_t> out;
  for (const auto& [a, b] : edges.pairs()) {
    if (a == i) out.push_back(b);
    else if (b == i) out.push_back(a);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace commplan
