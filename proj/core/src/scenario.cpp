#include "commplan/scenario.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace commplan {

namespace {

std::string robot_path(std::size_t i) { return "robots[" + std::to_string(i) + "]"; }

template <typename T>
std::string num(T value) {
  std::ostringstream os;
  os.precision(17);
  os << value;
  return os.str();
}

}  // namespace

std::vector<std::string> ScenarioConfig::validate() const {
  std::vector<std::string> errs;
  auto require = [&errs](bool ok, const std::string& path, const std::string& what) {
    if (!ok) errs.push_back(path + ": " + what);
  };

  require(dim >= 1, "dimension", "must be >= 1");
  require(link.d50 > 0.0, "link.d50", "must be > 0");
  require(link.alpha > 0.0, "link.alpha", "must be > 0");
  require(link.w_min > 0.0 && link.w_min < 1.0, "link.w_min", "must lie in (0, 1)");
  require(horizon.steps >= 1, "horizon.steps", "must be >= 1");
  require(horizon.u_max > 0.0, "horizon.u_max", "must be > 0");
  require(dual.rho > 0.0, "dual_ascent.rho", "must be > 0");
  require(dual.eta > 0.0, "dual_ascent.eta", "must be > 0");
  require(dual.max_rounds >= 1, "dual_ascent.max_rounds", "must be >= 1");
  require(dual.trade_cap > 0.0, "dual_ascent.trade_cap", "must be > 0");
  require(estimation.zeta > 0.0, "estimation.zeta", "must be > 0");
  require(lambda_lb > 0.0, "lambda_lb", "must be > 0");
  require(epsilon >= 0.0, "epsilon", "must be >= 0");
  require(move_steps >= 1, "move_steps", "must be >= 1");
  require(max_outer_cycles >= 0, "max_outer_cycles", "must be >= 0");
  require(delta_t > 0.0, "delta_t", "must be > 0");
  require(goal_tolerance > 0.0, "goal_tolerance", "must be > 0");
  require(collision_radius >= 0.0, "collision_radius", "must be >= 0");
  require(!robots.empty(), "robots", "must list at least one robot");

  bool geometry_ok = dim >= 1;
  for (std::size_t i = 0; i < robots.size(); ++i) {
    const auto& r = robots[i];
    const std::string path = robot_path(i);
    if (r.position.size() != dim) {
      errs.push_back(path + ".position: expected " + std::to_string(dim) + " coordinates");
      geometry_ok = false;
    } else if (!r.position.allFinite()) {
      errs.push_back(path + ".position: coordinates must be finite");
      geometry_ok = false;
    }
    require(r.radius > 0.0, path + ".radius", "must be > 0");
    require(r.h >= 0.0, path + ".h", "must be >= 0");
    if (r.role == Role::Inspection) {
      require(r.poi.size() == dim && r.poi.allFinite(), path + ".poi",
              "inspection robot needs a finite POI with " + std::to_string(dim) + " coordinates");
    } else {
      require(r.poi.size() == 0, path + ".poi", "only inspection robots take a POI");
    }
  }

  if (!geometry_ok || !errs.empty()) return errs;

  for (std::size_t i = 0; i < robots.size(); ++i) {
    for (std::size_t j = i + 1; j < robots.size(); ++j) {
      const double d = (robots[i].position - robots[j].position).norm();
      const double need = robots[i].radius + robots[j].radius + epsilon;
      if (d < need) {
        errs.push_back(robot_path(i) + ", " + robot_path(j) + ": distance " + num(d) +
                       " is below r_i + r_j + epsilon = " + num(need));
      }
    }
  }
  if (robots.size() >= 2) {
    const auto pos = initial_positions(*this);
    const auto b = bodies_of(*this, pos);
    const double lambda2 = fiedler(WeightedGraph::from_bodies(b, link)).value;
    if (!(lambda2 > lambda_lb)) {
      errs.push_back("robots: initial algebraic connectivity " + num(lambda2) + " must exceed lambda_lb " +
                     num(lambda_lb));
    }
  }
  return errs;
}

std::string_view to_string(RunMode mode) {
  switch (mode) {
    case RunMode::Trading: return "trading";
    case RunMode::NoTrading: return "no_trading";
    case RunMode::Centralized: return "centralized";
  }
  return "unknown";
}

RunMode parse_run_mode(std::string_view text) {
  if (text == "trading") return RunMode::Trading;
  if (text == "no_trading") return RunMode::NoTrading;
  if (text == "centralized") return RunMode::Centralized;
  throw std::invalid_argument("unknown run mode '" + std::string(text) + "'");
}

std::vector<RobotBody> bodies_of(const ScenarioConfig& config, std::span<const Vec> positions) {
  if (positions.size() != config.size()) throw std::invalid_argument("one position per robot expected");
  std::vector<RobotBody> out;
  out.reserve(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) out.push_back({i, positions[i], config.robots[i].radius});
  return out;
}

std::vector<Vec> initial_positions(const ScenarioConfig& config) {
  std::vector<Vec> out;
  out.reserve(config.size());
  for (const auto& r : config.robots) out.push_back(r.position);
  return out;
}

PlannerSettings planner_settings(const ScenarioConfig& config, RunMode mode) {
  PlannerSettings s;
  s.n_robots = config.size();
  s.link = config.link;
  s.horizon = config.horizon;
  s.horizon.dim = config.dim;
  s.dual = config.dual;
  s.estimation = config.estimation;
  s.epsilon = config.epsilon;
  s.trading = mode == RunMode::Trading;
  return s;
}

AgentConfig agent_config(const ScenarioConfig& config, std::size_t robot) {
  const RobotSpec& r = config.robots.at(robot);
  AgentConfig a;
  a.cost.role = r.role;
  a.cost.h = r.h;
  a.cost.poi = r.poi;
  a.radius = r.radius;
  a.lambda_lb = config.lambda_lb;
  a.move_steps = config.move_steps;
  return a;
}

ScenarioConfig make_random_scenario(std::uint64_t seed, std::size_t n_robots, int horizon_steps) {
  if (n_robots == 0) throw std::invalid_argument("need at least one robot");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  ScenarioConfig c;
  c.name = "random-" + std::to_string(seed);
  c.dim = 2;
  c.seed = seed;
  c.link = {4.0, 2.0, 0.05};
  c.horizon.steps = horizon_steps;
  c.horizon.dim = 2;
  c.horizon.u_max = 0.5;
  c.epsilon = 0.2;
  c.collision_radius = 0.0;

  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<Vec> pos{Vec::Zero(2)};
    while (pos.size() < n_robots) {
      const Vec& anchor = pos[static_cast<std::size_t>(unit(rng) * static_cast<double>(pos.size()))];
      const double angle = 2.0 * std::numbers::pi * unit(rng);
      const double dist = 2.0 + 2.5 * unit(rng);
      Vec p = anchor + dist * Vec{{std::cos(angle), std::sin(angle)}};
      bool clear = true;
      for (const auto& q : pos) clear = clear && (p - q).norm() >= 1.5;
      if (clear) pos.push_back(std::move(p));
    }
    c.robots.clear();
    for (std::size_t i = 0; i < n_robots; ++i) {
      RobotSpec r;
      r.position = pos[i];
      r.radius = 0.5;
      r.h = 0.1;
      if (i % 2 == 0) {
        r.role = Role::Inspection;
        const double angle = 2.0 * std::numbers::pi * unit(rng);
        const double dist = 3.0 + 5.0 * unit(rng);
        r.poi = pos[i] + dist * Vec{{std::cos(angle), std::sin(angle)}};
      }
      c.robots.push_back(std::move(r));
    }
    if (n_robots >= 2) {
      const auto b = bodies_of(c, pos);
      const double lambda2 = fiedler(WeightedGraph::from_bodies(b, c.link)).value;
      if (lambda2 < 1e-3) continue;
      c.lambda_lb = 0.8 * lambda2;
    }
    if (c.validate().empty()) return c;
  }
  throw std::runtime_error("could not sample a valid random scenario");
}

}  // namespace commplan
