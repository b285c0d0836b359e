#pragma once

#include <cstdint>
#include <vector>

#include "commplan/messages.hpp"
#include "commplan/metrics.hpp"
#include "commplan/oracle.hpp"
#include "commplan/robot_agent.hpp"
#include "commplan/scenario.hpp"

namespace commplan {

/// Synchronous-round world. Owns the clock, the true positions (inside the
/// agents), the message bus and the metrics log.
class Simulation {
 public:
  Simulation(ScenarioConfig config, RunMode mode);

  const ScenarioConfig& config() const { return config_; }
  RunMode mode() const { return mode_; }
  std::int64_t step() const { return step_; }
  int cycle() const { return cycle_; }
  const std::vector<RobotAgent>& agents() const { return agents_; }
  std::vector<Vec> positions() const;
  const MetricsLog& log() const { return log_; }
  MetricsLog take_log() { return std::move(log_); }

  // Ticks until no robot is still moving toward its reference.
  void move_phase();

  // One full planning period with the robots halted. Returns every robot's
  // report (empty in centralized mode). Throws ProtocolError on desync/stall.
  std::vector<CycleReport> plan_cycle();

  bool goals_reached() const;

  // The whole mission: alternate move and plan until all POIs are reached or
  // the cycle budget is spent. Fatal errors are caught and logged.
  void run();

 private:
  std::vector<StepOutput> tick();
  LocalView view_of(std::size_t i, std::span<const RobotBody> bodies, const EdgeSet& edges) const;
  void record_step();
  void check_contacts();
  void check_phase_sync();
  std::vector<CycleReport> plan_centralized();
  void record_cycle(const std::vector<CycleReport>& reports, std::int64_t start_step);
  void check_waypoints(std::int64_t k, std::span<const Vec> references);

  ScenarioConfig config_;
  RunMode mode_;
  std::vector<RobotAgent> agents_;
  MessageBus bus_;
  MetricsLog log_;
  std::int64_t step_ = 0;
  int cycle_ = 0;
};

MetricsLog run_scenario(const ScenarioConfig& config, RunMode mode);

}  // namespace commplan
