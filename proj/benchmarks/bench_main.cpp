#include <benchmark/benchmark.h>

#include <random>

#include "commplan/graph_connectivity.hpp"
#include "commplan/qp_solver.hpp"
#include "commplan/scenario.hpp"
#include "commplan/simulation.hpp"

using namespace commplan;

namespace {

void BM_Fiedler(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const ScenarioConfig c = make_random_scenario(11, n);
  const auto b = bodies_of(c, initial_positions(c));
  const WeightedGraph g = WeightedGraph::from_bodies(b, c.link);
  for (auto _ : state) benchmark::DoNotOptimize(fiedler(g).value);
}
BENCHMARK(BM_Fiedler)->Arg(4)->Arg(10)->Arg(30);

void BM_SolveQp(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 1.0);
  QuadraticProgram qp;
  Mat r = Mat::NullaryExpr(n, n, [&] { return g(rng); });
  qp.hessian = r * r.transpose() + Mat::Identity(n, n);
  qp.linear = Vec::NullaryExpr(n, [&] { return g(rng); });
  qp.ineq_coeff = Mat::NullaryExpr(n, n, [&] { return g(rng); });
  qp.ineq_rhs = Vec::Constant(n, 0.1);
  qp.box_lo = Vec::Constant(n, -0.5);
  qp.box_hi = Vec::Constant(n, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(solve_qp(qp).objective);
}
BENCHMARK(BM_SolveQp)->Arg(4)->Arg(12)->Arg(40);

void BM_PlanCycle(benchmark::State& state) {
  const ScenarioConfig c = make_random_scenario(5, static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) {
    Simulation sim(c, RunMode::Trading);
    benchmark::DoNotOptimize(sim.plan_cycle().size());
  }
}
BENCHMARK(BM_PlanCycle)->Arg(4)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
