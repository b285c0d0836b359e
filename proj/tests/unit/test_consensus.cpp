#include <doctest.h>

#include <random>

#include "commplan/consensus.hpp"
#include "protocol.hpp"

using namespace commplan;

namespace {

Vec v2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

// Robots 0..n-1 on a line with spacing 2; with the default world link only
// consecutive robots are linked.
harness::StaticWorld line(int n) {
  std::vector<Vec> pos;
  for (int i = 0; i < n; ++i) pos.push_back(v2(2.0 * i, 0.0));
  return harness::make_world(pos, LinkParams{2.0, 3.0, 0.05});
}

}  // namespace

TEST_CASE("observe fills the own row and neighbour pairs") {
  const auto w = line(3);
  AdjacencyEstimate e(1, 3);
  e = local_adjacency_observe(std::move(e), w.positions[1], harness::views(w, 1), w.link);
  CHECK(e.observed(0, 1));
  CHECK(e.observed(1, 2));
  CHECK(e.observed(0, 2));
  CHECK(e.at(0, 1) == link_weight(w.positions[0], w.positions[1], w.link));
  CHECK(e.at(0, 2) == 0.0);  // not an edge
  CHECK(e.matrix() == e.matrix().transpose());
  CHECK(e.matrix().diagonal().isZero(0.0));

  AdjacencyEstimate lone(0, 3);
  lone = local_adjacency_observe(std::move(lone), v2(0, 0), {}, w.link);
  CHECK(lone.matrix().isZero(0.0));
}

TEST_CASE("merge takes the max over neighbours on unobserved entries only") {
  AdjacencyEstimate e(0, 4);
  Mat own = Mat::Zero(4, 4);
  Mat a = Mat::Zero(4, 4), b = Mat::Zero(4, 4);
  a(2, 3) = a(3, 2) = 0.5;
  b(2, 3) = b(3, 2) = 0.1;
  std::vector<Mat> in{a, b};
  e = max_consensus_merge(std::move(e), in);
  CHECK(e.at(2, 3) == 0.5);
  CHECK(e.at(3, 2) == 0.5);

  AdjacencyEstimate same(0, 4);
  CHECK(max_consensus_merge(std::move(same), {}).matrix() == own);
}

TEST_CASE("far entries travel one hop per step along a chain") {
  const auto w = line(4);
  // (0,1) is first seen by robot 1, two hops from robot 3
  const double truth = link_weight(w.positions[0], w.positions[1], w.link);
  auto est = harness::run_estimation(w, 2);
  CHECK(est[3].at(0, 1) == 0.0);
  est = harness::run_estimation(w, 3);
  CHECK(est[3].at(0, 1) == truth);
}

TEST_CASE("convergence test on adjacency change") {
  EstimationParams p{1e-6};
  const Mat a = Mat::Constant(3, 3, 0.3);
  CHECK(adjacency_converged(a, a, p));
  Mat b = a;
  b(0, 1) += 2e-6;
  CHECK_FALSE(adjacency_converged(b, a, p));
  CHECK(adjacency_converged((a.array() + 0.5e-6).matrix(), a, p));
  CHECK_THROWS(EstimationParams{0.0}.validate());
}

TEST_CASE("estimated Fiedler value") {
  const auto w = line(3);
  auto est = harness::run_estimation(w, 3);
  std::vector<RobotBody> bodies;
  for (std::size_t i = 0; i < 3; ++i) bodies.push_back({i, w.positions[i], 0.1});
  CHECK(estimate_fiedler(est[0]).value == fiedler(WeightedGraph::from_bodies(bodies, w.link)).value);
  CHECK(estimate_fiedler(AdjacencyEstimate(0, 3)).value == 0.0);
}

TEST_CASE("missing links never raise the estimate") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const auto w = harness::random_connected_world(rng, 3 + trial % 8);
    std::vector<RobotBody> bodies;
    for (std::size_t i = 0; i < w.size(); ++i) bodies.push_back({i, w.positions[i], 0.1});
    const double truth = fiedler(WeightedGraph::from_bodies(bodies, w.link)).value;
    for (int k = 1; k <= 4; ++k) {
      const auto est = harness::run_estimation(w, k);
      for (const auto& e : est) CHECK(estimate_fiedler(e).value <= truth + 1e-12);
    }
  }
}

TEST_CASE("switch time once everyone is ready") {
  ConvergenceState s = ConvergenceState::initial(0, 4);
  s.ready.assign(4, 1);
  s.dist = {0, 1, 2, 3};
  s = convergence_step(std::move(s), {}, true, 7);
  CHECK(s.switch_at == 10);
  CHECK(should_switch(s, 10));
  CHECK_FALSE(should_switch(s, 9));
  CHECK_FALSE(should_switch(ConvergenceState::initial(0, 2), 10));

  ConvergenceState idle = ConvergenceState::initial(0, 3);
  idle = convergence_step(std::move(idle), {}, false, 3);
  CHECK(idle.switch_at == kNever);
}

TEST_CASE("hop distances after stepping a path") {
  const auto w = line(3);
  std::vector<ConvergenceState> st;
  for (std::size_t i = 0; i < 3; ++i) st.push_back(ConvergenceState::initial(i, 3));
  for (int k = 0; k < 3; ++k) {
    const auto prev = st;
    for (std::size_t i = 0; i < 3; ++i) {
      std::vector<ConvergenceState> in;
      if (k > 0)
        for (auto j : w.nbrs[i]) in.push_back(prev[j]);
      st[i] = convergence_step(std::move(st[i]), in, false, k);
    }
    if (k == 2) CHECK(st[0].dist[2] == 2);
  }
  CHECK(st[0].dist == std::vector<std::int64_t>{0, 1, 2});
}

TEST_CASE("distances equal BFS hops within diameter steps") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const auto w = harness::random_connected_world(rng, 2 + trial % 11);
    const int diam = oracle::diameter(w.adj);
    std::vector<ConvergenceState> st;
    for (std::size_t i = 0; i < w.size(); ++i) st.push_back(ConvergenceState::initial(i, w.size()));
    for (int k = 0; k <= diam; ++k) {
      const auto prev = st;
      for (std::size_t i = 0; i < w.size(); ++i) {
        std::vector<ConvergenceState> in;
        if (k > 0)
          for (auto j : w.nbrs[i]) in.push_back(prev[j]);
        st[i] = convergence_step(std::move(st[i]), in, false, k);
      }
    }
    for (std::size_t i = 0; i < w.size(); ++i) {
      const auto hops = oracle::bfs(w.adj, static_cast<int>(i));
      for (std::size_t j = 0; j < w.size(); ++j) CHECK(st[i].dist[j] == hops[j]);
    }
  }
}

TEST_CASE("state invariants while stepping") {
  std::mt19937_64 rng(44);
  const auto w = harness::random_connected_world(rng, 8);
  std::vector<ConvergenceState> st;
  for (std::size_t i = 0; i < w.size(); ++i) st.push_back(ConvergenceState::initial(i, w.size()));
  std::uniform_int_distribution<int> delay(0, 10);
  std::vector<int> d(w.size());
  for (auto& x : d) x = delay(rng);
  for (int k = 0; k < 40; ++k) {
    const auto prev = st;
    for (std::size_t i = 0; i < w.size(); ++i) {
      std::vector<ConvergenceState> in;
      if (k > 0)
        for (auto j : w.nbrs[i]) in.push_back(prev[j]);
      st[i] = convergence_step(std::move(st[i]), in, k >= d[i], k);
      CHECK(st[i].dist[i] == 0);
      CHECK(st[i].switch_at <= prev[i].switch_at);
      for (std::size_t j = 0; j < w.size(); ++j) CHECK(st[i].ready[j] >= prev[i].ready[j]);
    }
  }
}

TEST_CASE("phase reset") {
  ConvergenceState s = ConvergenceState::initial(2, 4);
  s.ready.assign(4, 1);
  s.dist = {3, 1, 0, 2};
  s.switch_at = 12;
  const ConvergenceState r = phase_reset(s);
  const ConvergenceState fresh = ConvergenceState::initial(2, 4);
  CHECK(r.ready == fresh.ready);
  CHECK(r.dist == fresh.dist);
  CHECK(r.switch_at == kNever);
  CHECK(phase_reset(r).dist == r.dist);
  CHECK(r.dist[2] == 0);
}

TEST_CASE("everyone fires together on random graphs") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::int64_t> delay(0, 15);
  for (int trial = 0; trial < 30; ++trial) {
    const auto w = harness::random_connected_world(rng, 2 + trial % 11);
    std::vector<std::int64_t> d(w.size());
    for (auto& x : d) x = delay(rng);
    const auto tr = harness::run_switch(w, d);
    for (auto f : tr.fired) CHECK(f == tr.fired[0]);
    CHECK(tr.fired[0] >= 0);
  }
}
