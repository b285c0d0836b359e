#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "commplan/robot_agent.hpp"

namespace commplan {

struct RobotSpec {
  Vec position;
  double radius = 0.5;
  Role role = Role::Support;
  Vec poi;  // inspection robots only
  double h = 0.0;
};

struct ScenarioConfig {
  std::string name = "unnamed";
  int dim = 2;
  std::vector<RobotSpec> robots;
  LinkParams link;
  HorizonParams horizon;
  DualAscentParams dual;
  EstimationParams estimation;
  double lambda_lb = 0.1;
  double epsilon = 0.1;
  int move_steps = 1;
  int max_outer_cycles = 100;
  std::uint64_t seed = 0;
  double delta_t = 1.0;          // seconds per step, bookkeeping only
  double goal_tolerance = 1.0;   // inspection robot counts as arrived inside this radius
  double collision_radius = 0.0; // non-neighbours closer than this are planned around too

  std::size_t size() const { return robots.size(); }

  // Every violated invariant as "field.path: message"; empty when valid.
  std::vector<std::string> validate() const;
};

enum class RunMode { Trading, NoTrading, Centralized };

std::string_view to_string(RunMode mode);
RunMode parse_run_mode(std::string_view text);  // throws std::invalid_argument

std::vector<RobotBody> bodies_of(const ScenarioConfig& config, std::span<const Vec> positions);
std::vector<Vec> initial_positions(const ScenarioConfig& config);

PlannerSettings planner_settings(const ScenarioConfig& config, RunMode mode);
AgentConfig agent_config(const ScenarioConfig& config, std::size_t robot);

/// A connected, collision-free random scenario with `n_robots` robots; about
/// half are inspection robots with POIs a few link lengths away.
ScenarioConfig make_random_scenario(std::uint64_t seed, std::size_t n_robots, int horizon_steps = 1);

}  // namespace commplan
