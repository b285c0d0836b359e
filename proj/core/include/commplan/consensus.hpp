#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "commplan/graph_connectivity.hpp"

namespace commplan {

struct EstimationParams {
  double zeta = 1e-6;  // max entry change for the estimate to count as converged

  void validate() const;
};

/// One robot's view of the full adjacency matrix.
///
/// Entries the owner can compute itself (links to its neighbours, and links
/// between pairs of its neighbours) are marked observed; every other entry is
/// filled in by max consensus over neighbour estimates.
class AdjacencyEstimate {
 public:
  AdjacencyEstimate(std::size_t owner, std::size_t n_robots);

  std::size_t owner() const { return owner_; }
  std::size_t size() const { return static_cast<std::size_t>(matrix_.rows()); }
  const Mat& matrix() const { return matrix_; }
  double at(std::size_t j, std::size_t l) const {
    return matrix_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l));
  }
  bool observed(std::size_t j, std::size_t l) const { return observed_[j * size() + l] != 0; }

  // Back to the cold-start state: all zeros, nothing observed.
  void reset();

 private:
  friend AdjacencyEstimate local_adjacency_observe(AdjacencyEstimate, const Vec&,
                                                   std::span<const NeighborView>, const LinkParams&);
  friend AdjacencyEstimate max_consensus_merge(AdjacencyEstimate, std::span<const Mat>);

  void set(std::size_t j, std::size_t l, double value);

  std::size_t owner_;
  Mat matrix_;
  std::vector<std::uint8_t> observed_;
};

AdjacencyEstimate local_adjacency_observe(AdjacencyEstimate estimate, const Vec& own_position,
                                          std::span<const NeighborView> nbrs, const LinkParams& params);

// Unobserved off-diagonal entries take the max of the own and the neighbours'
// previous values; observed entries and the diagonal are left alone.
AdjacencyEstimate max_consensus_merge(AdjacencyEstimate estimate, std::span<const Mat> neighbor_matrices);

bool adjacency_converged(const Mat& current, const Mat& previous, const EstimationParams& params);

FiedlerResult estimate_fiedler(const AdjacencyEstimate& estimate);

inline constexpr std::int64_t kNever = std::numeric_limits<std::int64_t>::max();

/// Leaderless phase-switch state: who is ready, hop distances, agreed switch step.
struct ConvergenceState {
  std::size_t owner = 0;
  std::vector<std::uint8_t> ready;
  std::vector<std::int64_t> dist;  // kNever when unknown
  std::int64_t switch_at = kNever;

  static ConvergenceState initial(std::size_t owner, std::size_t n_robots);
  bool all_ready() const;
  bool all_reachable() const;
};

/// One synchronous round of or-consensus on ready, min-consensus on dist and
/// switch_at; once everything is known to be ready, switch_at is capped at
/// k + max(dist).
ConvergenceState convergence_step(ConvergenceState state, std::span<const ConvergenceState> nbrs,
                                  bool own_converged, std::int64_t k);

bool should_switch(const ConvergenceState& state, std::int64_t k);

ConvergenceState phase_reset(ConvergenceState state);

}  // namespace commplan
