#pragma once

// Synchronous drivers for the consensus building blocks on a fixed graph:
// every robot reads its neighbours' state from the previous step only.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "commplan/consensus.hpp"
#include "commplan/link_model.hpp"
#include "oracles.hpp"

namespace harness {

using commplan::Vec;

struct StaticWorld {
  std::vector<Vec> positions;
  commplan::LinkParams link;
  commplan::EdgeSet edges;
  std::vector<std::vector<std::size_t>> nbrs;
  std::vector<std::vector<int>> adj;  // int copy for the BFS oracle

  std::size_t size() const { return positions.size(); }
};

inline StaticWorld make_world(std::vector<Vec> positions, commplan::LinkParams link) {
  StaticWorld w;
  w.positions = std::move(positions);
  w.link = link;
  std::vector<commplan::RobotBody> bodies;
  for (std::size_t i = 0; i < w.positions.size(); ++i) bodies.push_back({i, w.positions[i], 0.1});
  w.edges = commplan::edge_set(bodies, link);
  for (std::size_t i = 0; i < w.positions.size(); ++i) {
    w.nbrs.push_back(commplan::neighbors(i, w.edges));
    std::vector<int> a;
    for (auto j : w.nbrs.back()) a.push_back(static_cast<int>(j));
    w.adj.push_back(a);
  }
  return w;
}

// Random connected world with N robots scattered so that the graph is
// connected but usually not complete.
inline StaticWorld random_connected_world(std::mt19937_64& rng, std::size_t n) {
  const commplan::LinkParams link{2.0, 3.0, 0.05};
  while (true) {
    const double spread = 1.3 * std::sqrt(static_cast<double>(n));
    auto w = make_world(oracle::random_positions(rng, n, spread), link);
    if (oracle::diameter(w.adj) > 0) return w;
  }
}

inline std::vector<commplan::NeighborView> views(const StaticWorld& w, std::size_t i) {
  std::vector<commplan::NeighborView> out;
  for (auto j : w.nbrs[i]) out.push_back({j, w.positions[j]});
  return out;
}

// Runs `steps` rounds of observe + merge from cold start.
inline std::vector<commplan::AdjacencyEstimate> run_estimation(const StaticWorld& w, int steps) {
  std::vector<commplan::AdjacencyEstimate> est;
  for (std::size_t i = 0; i < w.size(); ++i) est.emplace_back(i, w.size());
  for (int k = 0; k < steps; ++k) {
    std::vector<commplan::Mat> prev;
    for (const auto& e : est) prev.push_back(e.matrix());
    for (std::size_t i = 0; i < w.size(); ++i) {
      est[i] = commplan::local_adjacency_observe(std::move(est[i]), w.positions[i], views(w, i), w.link);
      std::vector<commplan::Mat> inbox;
      if (k > 0)
        for (auto j : w.nbrs[i]) inbox.push_back(prev[j]);
      est[i] = commplan::max_consensus_merge(std::move(est[i]), inbox);
    }
  }
  return est;
}

struct SwitchTrace {
  std::vector<std::int64_t> fired;   // step at which each robot fired, or -1
  std::int64_t first_all_ready = -1; // first step at which some robot knew everyone was ready
};

// Robot i reports own convergence from step delays[i] onward.
inline SwitchTrace run_switch(const StaticWorld& w, const std::vector<std::int64_t>& delays,
                              std::int64_t max_steps = 10000) {
  const std::size_t n = w.size();
  std::vector<commplan::ConvergenceState> st;
  for (std::size_t i = 0; i < n; ++i) st.push_back(commplan::ConvergenceState::initial(i, n));
  SwitchTrace tr;
  tr.fired.assign(n, -1);
  for (std::int64_t k = 0; k < max_steps; ++k) {
    const auto prev = st;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<commplan::ConvergenceState> inbox;
      if (k > 0)
        for (auto j : w.nbrs[i]) inbox.push_back(prev[j]);
      st[i] = commplan::convergence_step(std::move(st[i]), inbox, k >= delays[i], k);
      if (tr.first_all_ready < 0 && st[i].all_ready()) tr.first_all_ready = k;
      if (tr.fired[i] < 0 && commplan::should_switch(st[i], k)) tr.fired[i] = k;
    }
    bool done = true;
    for (auto f : tr.fired) done = done && f >= 0;
    if (done) break;
  }
  return tr;
}

}  // namespace harness
