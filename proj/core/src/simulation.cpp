#include "commplan/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "commplan/errors.hpp"

namespace commplan {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kGeomTol = 1e-9;

std::string pair_text(std::size_t i, std::size_t j) {
  return "robots " + std::to_string(i) + "," + std::to_string(j);
}

}  // namespace

Simulation::Simulation(ScenarioConfig config, RunMode mode)
    : config_(std::move(config)), mode_(mode), bus_(config_.size()) {
  config_.horizon.dim = config_.dim;
  const PlannerSettings settings = planner_settings(config_, mode_);
  agents_.reserve(config_.size());
  for (std::size_t i = 0; i < config_.size(); ++i)
    agents_.emplace_back(i, config_.robots[i].position, agent_config(config_, i), settings);
  log_.mode = mode_;
  log_.n_robots = config_.size();
  record_step();
}

std::vector<Vec> Simulation::positions() const {
  std::vector<Vec> out;
  out.reserve(agents_.size());
  for (const auto& a : agents_) out.push_back(a.position());
  return out;
}

LocalView Simulation::view_of(std::size_t i, std::span<const RobotBody> bodies, const EdgeSet& edges) const {
  LocalView v;
  for (const auto& b : bodies) {
    if (b.id == i) continue;
    if (edges.contains(i, b.id)) {
      v.neighbors.push_back({b.id, b.position});
    } else if ((b.position - bodies[i].position).norm() < config_.collision_radius) {
      v.obstacles.push_back({b.id, b.position});
    }
  }
  return v;
}

std::vector<StepOutput> Simulation::tick() {
  const std::int64_t k = ++step_;
  const auto pos = positions();
  const auto bodies = bodies_of(config_, pos);
  const EdgeSet edges = edge_set(bodies, config_.link);
  Inboxes inboxes = bus_.collect(k);

  std::vector<StepOutput> outputs;
  outputs.reserve(agents_.size());
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    const LocalView view = view_of(i, bodies, edges);
    outputs.push_back(agents_[i].step(k, view, inboxes[i], log_.events));
  }
  for (auto& out : outputs)
    for (auto& msg : out.outbox) bus_.post(std::move(msg), edges);

  for (const auto& out : outputs) {
    if (!out.round) continue;
    const RoundReport& r = *out.round;
    log_.rounds.push_back({k, cycle_ + 1, r.robot, r.round, r.objective, r.trades, r.multiplier_norm});
  }
  record_step();
  check_contacts();
  check_phase_sync();
  return outputs;
}

void Simulation::record_step() {
  StepRecord rec;
  rec.step = step_;
  rec.positions = positions();
  for (const auto& a : agents_) rec.references.push_back(a.reference());
  const GroundTruth g = ground_truth_metrics(rec.positions, config_.link);
  rec.true_lambda2 = g.lambda2;
  rec.min_distance = g.min_distance;
  rec.est_min = kNaN;
  rec.est_max = kNaN;
  for (const auto& a : agents_) {
    if (!a.lambda_hat()) continue;
    const double v = *a.lambda_hat();
    rec.est_min = std::isnan(rec.est_min) ? v : std::min(rec.est_min, v);
    rec.est_max = std::isnan(rec.est_max) ? v : std::max(rec.est_max, v);
  }
  log_.steps.push_back(std::move(rec));
}

void Simulation::check_contacts() {
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    for (std::size_t j = i + 1; j < agents_.size(); ++j) {
      const double d = (agents_[i].position() - agents_[j].position()).norm();
      const double need = config_.robots[i].radius + config_.robots[j].radius;
      if (d < need - kGeomTol) {
        log_.events.push_back({step_, event_kind::kCollision,
                               pair_text(i, j) + " distance " + std::to_string(d), true});
      }
    }
  }
}

void Simulation::check_phase_sync() {
  for (const auto& a : agents_) {
    if (a.phase() != agents_.front().phase()) {
      log_.events.push_back({step_, event_kind::kPhaseDesync,
                             "robot " + std::to_string(a.id()) + " in " + to_string(a.phase()) +
                                 ", robot 0 in " + to_string(agents_.front().phase()),
                             true});
      throw ProtocolError("robots left a phase on different steps");
    }
  }
}

void Simulation::move_phase() {
  while (std::any_of(agents_.begin(), agents_.end(),
                     [](const RobotAgent& a) { return a.phase() == AgentPhase::MoveToReference; })) {
    tick();
  }
}

bool Simulation::goals_reached() const {
  bool any = false;
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    const auto& spec = config_.robots[i];
    if (spec.role != Role::Inspection) continue;
    any = true;
    if ((agents_[i].position() - spec.poi).norm() > config_.goal_tolerance) return false;
  }
  return any;
}

void Simulation::check_waypoints(std::int64_t k, std::span<const Vec> references) {
  for (std::size_t i = 0; i < references.size(); ++i) {
    for (std::size_t j = i + 1; j < references.size(); ++j) {
      const double d = (references[i] - references[j]).norm();
      const double need = config_.robots[i].radius + config_.robots[j].radius + config_.epsilon;
      if (d < need - kGeomTol) {
        log_.events.push_back({k, event_kind::kCollision,
                               pair_text(i, j) + " waypoint distance " + std::to_string(d) + " below " +
                                   std::to_string(need),
                               true});
      }
    }
  }
}

std::vector<CycleReport> Simulation::plan_centralized() {
  const auto pos = positions();
  const Snapshot snap = make_snapshot(config_, pos);
  const OracleResult res = centralized_oracle(config_, snap);
  ++cycle_;

  std::vector<Vec> refs = pos;
  if (res.optimal()) {
    for (std::size_t i = 0; i < pos.size(); ++i) {
      refs[i] = pos[i] + res.inputs[i].head(config_.dim).cwiseMax(-config_.horizon.u_max)
                             .cwiseMin(config_.horizon.u_max);
    }
  } else {
    log_.events.push_back({step_, event_kind::kOracleInfeasible, std::string(to_string(res.status)), false});
  }
  for (std::size_t i = 0; i < agents_.size(); ++i) agents_[i].command_reference(refs[i]);
  check_waypoints(step_, refs);

  CycleRecord rec;
  rec.cycle = cycle_;
  rec.start_step = step_;
  rec.end_step = step_;
  rec.objective = res.optimal() ? res.objective : kNaN;
  rec.no_trade_objective = kNaN;
  rec.centralized_objective = rec.objective;
  rec.true_lambda2 = snap.lambda2;
  rec.lambda_hat.assign(pos.size(), kNaN);
  rec.net_trades.assign(pos.size(), 0.0);
  rec.trading_percentage.assign(pos.size(), 0.0);
  log_.cycles.push_back(rec);
  log_.costs.push_back({cycle_, "centralized", rec.objective});
  return {};
}

std::vector<CycleReport> Simulation::plan_cycle() {
  move_phase();
  if (mode_ == RunMode::Centralized) return plan_centralized();

  const std::int64_t start = step_ + 1;
  const std::int64_t n = static_cast<std::int64_t>(agents_.size());
  const std::int64_t guard = 6 * n + 2 * config_.dual.max_rounds + 32;
  std::vector<CycleReport> reports;
  for (std::int64_t spent = 0; reports.empty(); ++spent) {
    if (spent >= guard) throw ProtocolError("planning period did not finish");
    auto outputs = tick();
    for (auto& out : outputs)
      if (out.cycle) reports.push_back(std::move(*out.cycle));
    if (!reports.empty() && reports.size() != agents_.size()) {
      log_.events.push_back({step_, event_kind::kPhaseDesync, "only some robots finalised", true});
      throw ProtocolError("robots finalised on different steps");
    }
  }
  ++cycle_;
  record_cycle(reports, start);
  return reports;
}

void Simulation::record_cycle(const std::vector<CycleReport>& reports, std::int64_t start_step) {
  const std::size_t n = reports.size();
  const auto pos = positions();

  CycleRecord rec;
  rec.cycle = cycle_;
  rec.start_step = start_step;
  rec.end_step = step_;
  rec.steps = step_ - start_step + 1;
  rec.lambda_hat.resize(n);
  rec.net_trades.assign(n, 0.0);
  rec.trading_percentage.assign(n, kNaN);

  const Snapshot snap = make_snapshot(config_, pos);
  rec.true_lambda2 = snap.lambda2;

  std::vector<Vec> refs(n);
  Eigen::Index budget_rows = 0;
  for (const auto& r : reports) budget_rows = std::max(budget_rows, r.problem.budget.rhs.size());
  Vec summed_local = Vec::Zero(budget_rows);
  Vec global = Vec::Zero(budget_rows);

  for (const auto& r : reports) {
    const std::size_t i = r.robot;
    refs[i] = r.reference;
    rec.objective += r.solution.objective;
    rec.no_trade_objective += r.no_trade_objective;
    rec.lambda_hat[i] = r.lambda_hat;
    rec.max_rounds = std::max(rec.max_rounds, r.rounds);
    rec.dual_converged = rec.dual_converged && r.dual_converged;
    const double net = r.trades.sum();
    rec.net_trades[i] = net;
    const double share = (r.lambda_hat - config_.lambda_lb) / static_cast<double>(n);
    if (share > 0.0) rec.trading_percentage[i] = 100.0 * net / share;

    for (std::size_t a = 0; a < r.neighbors.size(); ++a) {
      const Eigen::Index ai = static_cast<Eigen::Index>(a);
      log_.trades.push_back({cycle_, i, r.neighbors[a], r.trades(ai), r.multipliers(ai)});
    }
    if (r.problem.budget.rhs.size() > 0) {
      summed_local += r.problem.budget.lhs(r.solution.inputs, r.trades);
      global -= r.problem.budget.coeff_u * r.solution.inputs;
    }
    if (n >= 2 && std::abs(r.lambda_hat - snap.lambda2) > kGeomTol) {
      log_.events.push_back({step_, event_kind::kEstimateMismatch,
                             "robot " + std::to_string(i) + " lambda_hat " + std::to_string(r.lambda_hat) +
                                 " true " + std::to_string(snap.lambda2),
                             false});
    }
  }

  // Antisymmetry and exact cancellation, one edge at a time.
  double trade_sum = 0.0;
  for (const auto& r : reports) {
    for (std::size_t a = 0; a < r.neighbors.size(); ++a) {
      const std::size_t j = r.neighbors[a];
      if (j < r.robot) continue;
      const auto& other = reports[j];
      const auto it = std::find(other.neighbors.begin(), other.neighbors.end(), r.robot);
      if (it == other.neighbors.end()) {
        log_.events.push_back({step_, event_kind::kSeparationMismatch,
                               pair_text(r.robot, j) + " disagree on the link", true});
        continue;
      }
      const double t_ij = r.trades(static_cast<Eigen::Index>(a));
      const double t_ji = other.trades(static_cast<Eigen::Index>(it - other.neighbors.begin()));
      trade_sum += t_ij + t_ji;
    }
  }
  rec.trade_sum = trade_sum;
  rec.separation_residual = budget_rows > 0 ? (summed_local - global).cwiseAbs().maxCoeff() : 0.0;
  if (trade_sum != 0.0 || rec.separation_residual > 1e-12) {
    log_.events.push_back({step_, event_kind::kSeparationMismatch,
                           "trade sum " + std::to_string(trade_sum) + " residual " +
                               std::to_string(rec.separation_residual),
                           true});
  }

  const OracleResult oracle = centralized_oracle(config_, snap);
  rec.centralized_objective = oracle.optimal() ? oracle.objective : kNaN;
  if (!oracle.optimal())
    log_.events.push_back({step_, event_kind::kOracleInfeasible, std::string(to_string(oracle.status)), false});

  check_waypoints(step_, refs);

  log_.costs.push_back({cycle_, std::string(to_string(mode_)), rec.objective});
  if (mode_ == RunMode::Trading) log_.costs.push_back({cycle_, "no_trading", rec.no_trade_objective});
  log_.costs.push_back({cycle_, "centralized", rec.centralized_objective});
  log_.cycles.push_back(std::move(rec));
}

void Simulation::run() {
  try {
    while (true) {
      move_phase();
      if (goals_reached()) {
        log_.goals_reached = true;
        break;
      }
      if (cycle_ >= config_.max_outer_cycles) break;
      plan_cycle();
    }
  } catch (const std::exception& e) {
    log_.aborted = true;
    log_.abort_reason = e.what();
    log_.events.push_back({step_, event_kind::kFatal, e.what(), true});
  }
}

MetricsLog run_scenario(const ScenarioConfig& config, RunMode mode) {
  Simulation sim(config, mode);
  sim.run();
  return sim.take_log();
}

}  // namespace commplan
