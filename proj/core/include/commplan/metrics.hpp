#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "commplan/events.hpp"
#include "commplan/scenario.hpp"

namespace commplan {

struct StepRecord {
  std::int64_t step = 0;
  std::vector<Vec> positions;
  std::vector<Vec> references;
  double true_lambda2 = 0.0;
  double est_min = 0.0;  // NaN until some robot has an estimate
  double est_max = 0.0;
  double min_distance = 0.0;
};

struct RoundRecord {
  std::int64_t step = 0;
  int cycle = 0;
  std::size_t robot = 0;
  int round = 0;
  double objective = 0.0;
  Vec trades;
  double multiplier_norm = 0.0;
};

struct TradeRecord {
  int cycle = 0;
  std::size_t robot = 0;
  std::size_t neighbor = 0;
  double trade = 0.0;
  double multiplier = 0.0;
};

struct CycleRecord {
  int cycle = 0;
  std::int64_t start_step = 0;  // first protocol step of the planning period
  std::int64_t end_step = 0;    // step at which the plan was finalised
  std::int64_t steps = 0;       // protocol steps spent planning
  double objective = 0.0;       // summed final objective of this run's mode
  double no_trade_objective = 0.0;
  double centralized_objective = 0.0;
  double true_lambda2 = 0.0;
  std::vector<double> lambda_hat;
  std::vector<double> net_trades;          // sum_j t_ij per robot
  std::vector<double> trading_percentage;  // net trade over the equal budget share
  double separation_residual = 0.0;
  double trade_sum = 0.0;
  int max_rounds = 0;
  bool dual_converged = true;
};

struct CostRecord {
  int cycle = 0;
  std::string mode;
  double objective = 0.0;
};

struct MetricsLog {
  RunMode mode = RunMode::Trading;
  std::size_t n_robots = 0;
  std::vector<StepRecord> steps;
  std::vector<RoundRecord> rounds;
  std::vector<TradeRecord> trades;
  std::vector<CycleRecord> cycles;
  std::vector<CostRecord> costs;
  EventLog events;
  bool aborted = false;
  std::string abort_reason;
  bool goals_reached = false;

  std::size_t violation_count() const;

  // Summed net trade per robot across all cycles.
  std::vector<double> cumulative_net_trades() const;
};

struct StepStats {
  std::size_t count = 0;
  double min = 0.0;
  double median = 0.0;
  double mean = 0.0;
  double max = 0.0;
};

StepStats steps_per_cycle(const MetricsLog& log);

// positions.csv, fiedler.csv, trades.csv, cost.csv and events.csv in `dir`.
void write_traces(const MetricsLog& log, const std::filesystem::path& dir);

}  // namespace commplan
