#include "commplan/robot_agent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "commplan/errors.hpp"

namespace commplan {

const char* to_string(AgentPhase phase) {
  switch (phase) {
    case AgentPhase::MoveToReference: return "move";
    case AgentPhase::EstimateAdjacency: return "estimate";
    case AgentPhase::Optimize: return "optimize";
    case AgentPhase::Finalize: return "finalize";
  }
  return "unknown";
}

void AgentConfig::validate() const {
  if (!(cost.h >= 0.0)) throw std::invalid_argument("h must be >= 0");
  if (!(lambda_lb > 0.0)) throw std::invalid_argument("lambda_lb must be > 0");
  if (move_steps < 1) throw std::invalid_argument("move_steps must be >= 1");
  if (!(radius > 0.0)) throw std::invalid_argument("radius must be > 0");
}

void TradingState::reset(std::vector<std::size_t> nbrs) {
  neighbors = std::move(nbrs);
  const auto k = static_cast<Eigen::Index>(neighbors.size());
  trades = Vec::Zero(k);
  multipliers = Vec::Zero(k);
  neighbor_trades_prev = Vec::Zero(k);
  sent_trades = Vec::Zero(k);
}

RobotAgent::RobotAgent(std::size_t id, Vec position, AgentConfig config, PlannerSettings settings)
    : id_(id),
      position_(std::move(position)),
      reference_(position_),
      config_(std::move(config)),
      settings_(std::move(settings)),
      estimate_(id, settings_.n_robots),
      convergence_(ConvergenceState::initial(id, settings_.n_robots)) {
  config_.validate();
  if (position_.size() != settings_.horizon.dim) throw DimensionError("position dimension mismatch");
}

void RobotAgent::enter_estimation() {
  phase_ = AgentPhase::EstimateAdjacency;
  estimate_.reset();
  convergence_ = ConvergenceState::initial(id_, settings_.n_robots);
}

void RobotAgent::command_reference(const Vec& reference) {
  if (reference.size() != position_.size()) throw DimensionError("reference dimension mismatch");
  reference_ = reference;
  phase_ = AgentPhase::MoveToReference;
  move_count_ = 0;
}

Vec RobotAgent::move_step() {
  const double u_max = settings_.horizon.u_max;
  const Vec delta = (reference_ - position_).cwiseMax(-u_max).cwiseMin(u_max);
  position_ += delta;
  if (++move_count_ >= config_.move_steps) enter_estimation();
  return delta;
}

double RobotAgent::local_cost(const Vec& u) const { return stage_cost(position_, config_.cost, u); }

PlanningProblem RobotAgent::build_problem(const LocalView& view, const FiedlerResult* fiedler,
                                          const Vec& gradient) const {
  PlanningProblem p;
  p.position = position_;
  p.cost = config_.cost;
  p.horizon = settings_.horizon;
  const auto nbrs = view.neighbors.size();
  if (fiedler != nullptr) {
    p.budget = budget_constraint(gradient, fiedler->value, config_.lambda_lb, settings_.n_robots, nbrs,
                                 settings_.horizon);
  } else {
    p.budget.coeff_u = Mat::Zero(0, settings_.horizon.input_size());
    p.budget.coeff_t = Mat::Zero(0, static_cast<Eigen::Index>(nbrs));
    p.budget.rhs = Vec::Zero(0);
  }

  std::vector<NeighborView> others(view.neighbors.begin(), view.neighbors.end());
  others.insert(others.end(), view.obstacles.begin(), view.obstacles.end());
  std::sort(others.begin(), others.end(),
            [](const NeighborView& a, const NeighborView& b) { return a.id < b.id; });
  std::vector<Vec> positions;
  positions.reserve(others.size());
  for (const auto& o : others) positions.push_back(o.position);
  p.collision = stack_collision(position_, config_.radius, positions, settings_.epsilon, settings_.horizon);
  return p;
}

void RobotAgent::begin_optimization(PlanningProblem problem, std::vector<std::size_t> nbrs) {
  if (problem.num_trades() != static_cast<Eigen::Index>(nbrs.size()))
    throw DimensionError("trade columns must match neighbour count");
  problem_ = std::move(problem);
  trading_.reset(std::move(nbrs));
  rounds_ = 0;
  dual_converged_ = false;
  cap_reported_ = false;
  phase_ = AgentPhase::Optimize;
}

RoundOutcome RobotAgent::dual_ascent_round(const Vec& neighbor_trades_prev) {
  if (!problem_) throw std::logic_error("dual ascent round before begin_optimization");
  const Eigen::Index nu = settings_.horizon.input_size();
  const Eigen::Index nt = problem_->num_trades();
  if (neighbor_trades_prev.size() != nt) throw DimensionError("neighbour trade vector length mismatch");

  RoundOutcome out;
  if (!settings_.trading) {
    out.solution = solve_local(build_final_problem(*problem_, Vec::Zero(nt)), nu);
    out.solution.trades = Vec::Zero(nt);
    out.trades = trading_.trades;
    out.multipliers = trading_.multipliers;
    out.converged = true;
    return out;
  }

  // The pair averaged at finalize is (what this robot last sent, what it last heard).
  trading_.sent_trades = trading_.trades;
  out.solution = solve_local(build_local_problem(*problem_, neighbor_trades_prev, trading_.multipliers,
                                                 settings_.dual),
                             nu);
  if (!out.solution.optimal()) {
    out.trades = trading_.trades;
    out.multipliers = trading_.multipliers;
    out.converged = false;
    return out;
  }

  const Vec& mu_old = trading_.multipliers;
  const Vec mu_new = mu_old + settings_.dual.rho * (out.solution.trades + neighbor_trades_prev);
  // Normalised multiplier change, guarded against the zero start.
  bool converged = true;
  for (Eigen::Index j = 0; j < nt; ++j) {
    if (std::abs(mu_new(j) - mu_old(j)) > settings_.dual.eta * std::max(1.0, std::abs(mu_old(j)))) {
      converged = false;
      break;
    }
  }

  trading_.trades = out.solution.trades;
  trading_.multipliers = mu_new;
  trading_.neighbor_trades_prev = neighbor_trades_prev;
  out.trades = trading_.trades;
  out.multipliers = mu_new;
  out.converged = converged;
  return out;
}

FinalizeOutcome RobotAgent::finalize(const Vec& neighbor_trades_final) {
  if (!problem_) throw std::logic_error("finalize before begin_optimization");
  const Eigen::Index nu = settings_.horizon.input_size();
  const Eigen::Index nt = problem_->num_trades();
  if (neighbor_trades_final.size() != nt) throw DimensionError("neighbour trade vector length mismatch");
  phase_ = AgentPhase::Finalize;

  FinalizeOutcome out;
  out.trades = 0.5 * (trading_.sent_trades - neighbor_trades_final);

  QuadraticProgram qp = build_final_problem(*problem_, out.trades);
  out.solution = solve_local(qp, nu);
  if (!out.solution.optimal()) {
    out.fallback = true;
    Vec relaxed = out.trades;
    const double threshold = min_feasible_net_trade(*problem_);
    if (nt > 0 && std::isfinite(threshold)) {
      // Raise the net trade just to the feasibility threshold, spread evenly.
      const double deficit = std::max(0.0, threshold - out.trades.sum());
      const double margin = 1e-10 * std::max(1.0, std::abs(threshold));
      relaxed.array() += (deficit + margin) / static_cast<double>(nt);
    }
    LocalSolution retry = solve_local(build_final_problem(*problem_, relaxed), nu);
    if (retry.optimal()) {
      out.solution = std::move(retry);
    } else {
      out.solution.inputs = Vec::Zero(nu);
      out.solution.objective = qp.objective(out.solution.inputs);
      out.solution.status = SolveStatus::Infeasible;
    }
  }
  out.solution.trades = out.trades;

  const LocalSolution no_trade = solve_local(build_final_problem(*problem_, Vec::Zero(nt)), nu);
  out.no_trade_objective =
      no_trade.optimal() ? no_trade.objective : std::numeric_limits<double>::quiet_NaN();

  const double u_max = settings_.horizon.u_max;
  const Vec first = out.solution.inputs.head(settings_.horizon.dim).cwiseMax(-u_max).cwiseMin(u_max);
  out.reference = position_ + first;

  trading_.trades = out.trades;
  reference_ = out.reference;
  return out;
}

void RobotAgent::send_trades(std::int64_t k, std::vector<MessageEnvelope>& out) const {
  for (std::size_t a = 0; a < trading_.neighbors.size(); ++a) {
    out.push_back({id_, trading_.neighbors[a], k, PayloadKind::Trade,
                   encode_trade(trading_.trades(static_cast<Eigen::Index>(a)))});
  }
}

namespace {

void broadcast(std::size_t sender, std::int64_t k, std::span<const std::size_t> receivers, PayloadKind kind,
               const std::vector<std::uint8_t>& bytes, std::vector<MessageEnvelope>& out) {
  for (std::size_t r : receivers) out.push_back({sender, r, k, kind, bytes});
}

std::vector<std::size_t> ids_of(std::span<const NeighborView> nbrs) {
  std::vector<std::size_t> ids;
  ids.reserve(nbrs.size());
  for (const auto& nb : nbrs) ids.push_back(nb.id);
  return ids;
}

}  // namespace

StepOutput RobotAgent::step(std::int64_t k, const LocalView& view, std::span<const MessageEnvelope> inbox,
                            EventLog& events) {
  switch (phase_) {
    case AgentPhase::MoveToReference: return step_move();
    case AgentPhase::EstimateAdjacency: return step_estimate(k, view, inbox, events);
    case AgentPhase::Optimize: return step_optimize(k, inbox, events);
    case AgentPhase::Finalize: break;
  }
  throw std::logic_error("agent stepped while finalising");
}

StepOutput RobotAgent::step_move() {
  move_step();
  StepOutput out;
  out.finished_move = phase_ == AgentPhase::EstimateAdjacency;
  return out;
}

StepOutput RobotAgent::step_estimate(std::int64_t k, const LocalView& view,
                                     std::span<const MessageEnvelope> inbox, EventLog& events) {
  const Mat previous = estimate_.matrix();
  estimate_ = local_adjacency_observe(std::move(estimate_), position_, view.neighbors, settings_.link);

  std::vector<Mat> nbr_estimates;
  std::vector<ConvergenceState> nbr_states;
  for (const auto& msg : inbox) {
    if (msg.kind == PayloadKind::Adjacency) nbr_estimates.push_back(decode_matrix(msg.payload));
    else if (msg.kind == PayloadKind::Convergence)
      nbr_states.push_back(decode_convergence(msg.payload, msg.sender));
  }
  estimate_ = max_consensus_merge(std::move(estimate_), nbr_estimates);
  const bool own = adjacency_converged(estimate_.matrix(), previous, settings_.estimation);
  convergence_ = convergence_step(std::move(convergence_), nbr_states, own, k);

  const auto receivers = ids_of(view.neighbors);
  StepOutput out;
  if (!should_switch(convergence_, k)) {
    broadcast(id_, k, receivers, PayloadKind::Adjacency, encode_matrix(estimate_.matrix()), out.outbox);
    broadcast(id_, k, receivers, PayloadKind::Convergence, encode_convergence(convergence_), out.outbox);
    return out;
  }

  gradient_ = Vec::Zero(settings_.horizon.dim);
  const FiedlerResult* fiedler_ptr = nullptr;
  if (settings_.n_robots >= 2) {
    fiedler_estimate_ = estimate_fiedler(estimate_);
    lambda_hat_ = fiedler_estimate_.value;
    gradient_ = fiedler_gradient(id_, position_, view.neighbors, settings_.link, fiedler_estimate_).grad;
    fiedler_ptr = &fiedler_estimate_;
    if (fiedler_estimate_.gap < kFiedlerMultiplicityGap) {
      events.push_back({k, event_kind::kFiedlerMultiplicity,
                        "robot " + std::to_string(id_) + " gap " + std::to_string(fiedler_estimate_.gap),
                        false});
    }
    if (fiedler_estimate_.value < config_.lambda_lb) {
      events.push_back({k, event_kind::kFiedlerBelowBound,
                        "robot " + std::to_string(id_) + " lambda_hat " +
                            std::to_string(fiedler_estimate_.value),
                        true});
    }
  }
  begin_optimization(build_problem(view, fiedler_ptr, gradient_), receivers);
  convergence_ = phase_reset(std::move(convergence_));
  if (settings_.trading) send_trades(k, out.outbox);
  broadcast(id_, k, receivers, PayloadKind::Convergence, encode_convergence(convergence_), out.outbox);
  return out;
}

StepOutput RobotAgent::step_optimize(std::int64_t k, std::span<const MessageEnvelope> inbox,
                                     EventLog& events) {
  Vec nbr_trades = trading_.neighbor_trades_prev;
  std::vector<ConvergenceState> nbr_states;
  std::vector<char> heard(trading_.neighbors.size(), 0);
  for (const auto& msg : inbox) {
    if (msg.kind == PayloadKind::Convergence) {
      nbr_states.push_back(decode_convergence(msg.payload, msg.sender));
    } else if (msg.kind == PayloadKind::Trade) {
      const auto it = std::lower_bound(trading_.neighbors.begin(), trading_.neighbors.end(), msg.sender);
      if (it == trading_.neighbors.end() || *it != msg.sender) continue;
      const auto a = static_cast<std::size_t>(it - trading_.neighbors.begin());
      nbr_trades(static_cast<Eigen::Index>(a)) = decode_trade(msg.payload);
      heard[a] = 1;
    }
  }
  if (settings_.trading) {
    for (std::size_t a = 0; a < heard.size(); ++a) {
      if (!heard[a]) {
        events.push_back({k, event_kind::kMissingMessage,
                          "robot " + std::to_string(id_) + " no trade from " +
                              std::to_string(trading_.neighbors[a]),
                          false});
      }
    }
  }

  const RoundOutcome round = dual_ascent_round(nbr_trades);
  ++rounds_;
  bool own = round.converged;
  if (!round.solution.optimal() && settings_.trading) {
    events.push_back({k, event_kind::kRoundFailed,
                      "robot " + std::to_string(id_) + " " + std::string(to_string(round.solution.status)),
                      false});
  }
  if (own) dual_converged_ = true;
  if (rounds_ >= settings_.dual.max_rounds && !own) {
    own = true;
    if (!cap_reported_) {
      events.push_back({k, event_kind::kDualAscentCap,
                        "robot " + std::to_string(id_) + " hit " + std::to_string(rounds_) + " rounds", false});
      cap_reported_ = true;
    }
  }

  StepOutput out;
  out.round = RoundReport{id_, rounds_, round.solution.objective, round.trades, round.multipliers.norm()};
  convergence_ = convergence_step(std::move(convergence_), nbr_states, own, k);

  if (!should_switch(convergence_, k)) {
    if (settings_.trading) send_trades(k, out.outbox);
    broadcast(id_, k, trading_.neighbors, PayloadKind::Convergence, encode_convergence(convergence_),
              out.outbox);
    return out;
  }

  const FinalizeOutcome fin = finalize(nbr_trades);
  if (fin.fallback) {
    events.push_back({k, event_kind::kFinalFallback, "robot " + std::to_string(id_), false});
  }
  CycleReport report;
  report.robot = id_;
  report.lambda_hat = lambda_hat_.value_or(std::numeric_limits<double>::quiet_NaN());
  report.fiedler_estimate = fiedler_estimate_;
  report.gradient = gradient_;
  report.neighbors = trading_.neighbors;
  report.trades = fin.trades;
  report.multipliers = trading_.multipliers;
  report.problem = *problem_;
  report.solution = fin.solution;
  report.no_trade_objective = fin.no_trade_objective;
  report.reference = fin.reference;
  report.rounds = rounds_;
  report.dual_converged = dual_converged_;
  report.fallback = fin.fallback;
  out.cycle = std::move(report);

  phase_ = AgentPhase::MoveToReference;
  move_count_ = 0;
  convergence_ = phase_reset(std::move(convergence_));
  return out;
}

}  // namespace commplan
