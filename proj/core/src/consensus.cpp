#include "commplan/consensus.hpp"

#include <algorithm>
#include <stdexcept>

#include "commplan/errors.hpp"

namespace commplan {

void EstimationParams::validate() const {
  if (!(zeta > 0.0)) throw std::invalid_argument("zeta must be > 0");
}

AdjacencyEstimate::AdjacencyEstimate(std::size_t owner, std::size_t n_robots)
    : owner_(owner),
      matrix_(Mat::Zero(static_cast<Eigen::Index>(n_robots), static_cast<Eigen::Index>(n_robots))),
      observed_(n_robots * n_robots, 0) {
  if (owner >= n_robots) throw std::invalid_argument("estimate owner out of range");
}

void AdjacencyEstimate::reset() {
  matrix_.setZero();
  std::fill(observed_.begin(), observed_.end(), 0);
}

void AdjacencyEstimate::set(std::size_t j, std::size_t l, double value) {
  matrix_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l)) = value;
  matrix_(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(j)) = value;
  observed_[j * size() + l] = 1;
  observed_[l * size() + j] = 1;
}

AdjacencyEstimate local_adjacency_observe(AdjacencyEstimate est, const Vec& own_position,
                                          std::span<const NeighborView> nbrs, const LinkParams& params) {
  std::fill(est.observed_.begin(), est.observed_.end(), 0);
  for (std::size_t a = 0; a < nbrs.size(); ++a) {
    if (nbrs[a].id >= est.size() || nbrs[a].id == est.owner_) throw DimensionError("bad neighbour index");
    est.set(est.owner_, nbrs[a].id, adjacency_weight(own_position, nbrs[a].position, params));
    for (std::size_t b = a + 1; b < nbrs.size(); ++b) {
      est.set(nbrs[a].id, nbrs[b].id, adjacency_weight(nbrs[a].position, nbrs[b].position, params));
    }
  }
  return est;
}

AdjacencyEstimate max_consensus_merge(AdjacencyEstimate est, std::span<const Mat> neighbor_matrices) {
  const auto n = static_cast<Eigen::Index>(est.size());
  for (const Mat& m : neighbor_matrices) {
    if (m.rows() != n || m.cols() != n) throw DimensionError("neighbour estimate size mismatch");
  }
  const Mat before = est.matrix_;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index l = 0; l < n; ++l) {
      if (j == l || est.observed(static_cast<std::size_t>(j), static_cast<std::size_t>(l))) continue;
      double v = before(j, l);
      for (const Mat& m : neighbor_matrices) v = std::max(v, m(j, l));
      est.matrix_(j, l) = v;
    }
  }
  return est;
}

bool adjacency_converged(const Mat& current, const Mat& previous, const EstimationParams& params) {
  if (current.rows() != previous.rows() || current.cols() != previous.cols())
    throw DimensionError("estimate size mismatch");
  if (current.size() == 0) return true;
  return (current - previous).cwiseAbs().maxCoeff() <= params.zeta;
}

FiedlerResult estimate_fiedler(const AdjacencyEstimate& estimate) {
  return fiedler(WeightedGraph(estimate.matrix()));
}

ConvergenceState ConvergenceState::initial(std::size_t owner, std::size_t n_robots) {
  if (owner >= n_robots) throw std::invalid_argument("state owner out of range");
  ConvergenceState s;
  s.owner = owner;
  s.ready.assign(n_robots, 0);
  s.dist.assign(n_robots, kNever);
  s.dist[owner] = 0;
  s.switch_at = kNever;
  return s;
}

bool ConvergenceState::all_ready() const {
  return std::all_of(ready.begin(), ready.end(), [](std::uint8_t b) { return b != 0; });
}

bool ConvergenceState::all_reachable() const {
  return std::all_of(dist.begin(), dist.end(), [](std::int64_t d) { return d != kNever; });
}

ConvergenceState convergence_step(ConvergenceState s, std::span<const ConvergenceState> nbrs,
                                  bool own_converged, std::int64_t k) {
  const std::size_t n = s.ready.size();
  for (const auto& nb : nbrs) {
    if (nb.ready.size() != n || nb.dist.size() != n) throw DimensionError("convergence state size mismatch");
  }
  if (own_converged) s.ready[s.owner] = 1;

  for (std::size_t j = 0; j < n; ++j) {
    if (j == s.owner) continue;
    for (const auto& nb : nbrs) {
      if (nb.ready[j]) s.ready[j] = 1;
      if (nb.dist[j] != kNever) s.dist[j] = std::min(s.dist[j], nb.dist[j] + 1);
    }
  }
  s.dist[s.owner] = 0;
  for (const auto& nb : nbrs) s.switch_at = std::min(s.switch_at, nb.switch_at);

  if (s.all_ready() && s.all_reachable()) {
    const std::int64_t far = *std::max_element(s.dist.begin(), s.dist.end());
    s.switch_at = std::min(s.switch_at, k + far);
  }
  return s;
}

bool should_switch(const ConvergenceState& state, std::int64_t k) {
  return state.switch_at != kNever && state.switch_at == k;
}

ConvergenceState phase_reset(ConvergenceState state) {
  return ConvergenceState::initial(state.owner, state.ready.size());
}

}  // namespace commplan
