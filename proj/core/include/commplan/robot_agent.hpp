#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "commplan/consensus.hpp"
#include "commplan/events.hpp"
#include "commplan/local_qp.hpp"
#include "commplan/messages.hpp"

namespace commplan {

enum class AgentPhase { MoveToReference, EstimateAdjacency, Optimize, Finalize };

const char* to_string(AgentPhase phase);

struct AgentConfig {
  CostSpec cost;
  double radius = 0.5;
  double lambda_lb = 0.1;
  int move_steps = 1;

  void validate() const;
};

/// Parameters every robot shares (known a priori, including N).
struct PlannerSettings {
  std::size_t n_robots = 1;
  LinkParams link;
  HorizonParams horizon;
  DualAscentParams dual;
  EstimationParams estimation;
  double epsilon = 0.1;  // clearance
  bool trading = true;
};

struct TradingState {
  std::vector<std::size_t> neighbors;  // frozen for the optimisation period
  Vec trades;                          // latest t_i
  Vec multipliers;                     // mu_i
  Vec neighbor_trades_prev;            // t_{N_i} received last round
  Vec sent_trades;                     // what this robot last sent

  void reset(std::vector<std::size_t> nbrs);
};

/// What a robot perceives at a step: neighbours over live links, plus any
/// extra nearby robots it must keep clear of.
struct LocalView {
  std::vector<NeighborView> neighbors;  // ascending id
  std::vector<NeighborView> obstacles;  // non-neighbours within the safety radius, ascending id
};

struct RoundOutcome {
  LocalSolution solution;
  Vec trades;
  Vec multipliers;
  bool converged = false;
};

struct FinalizeOutcome {
  Vec trades;  // averaged, t_ij = -t_ji bitwise
  LocalSolution solution;
  Vec reference;
  double no_trade_objective = 0.0;
  bool fallback = false;
};

/// Per-robot summary of one completed planning period.
struct CycleReport {
  std::size_t robot = 0;
  double lambda_hat = 0.0;
  FiedlerResult fiedler_estimate;
  Vec gradient;
  std::vector<std::size_t> neighbors;
  Vec trades;
  Vec multipliers;
  PlanningProblem problem;
  LocalSolution solution;
  double no_trade_objective = 0.0;
  Vec reference;
  int rounds = 0;
  bool dual_converged = false;
  bool fallback = false;
};

struct RoundReport {
  std::size_t robot = 0;
  int round = 0;
  double objective = 0.0;
  Vec trades;
  double multiplier_norm = 0.0;
};

struct StepOutput {
  std::vector<MessageEnvelope> outbox;
  std::optional<RoundReport> round;
  std::optional<CycleReport> cycle;
  bool finished_move = false;
};

/// One robot running the move / estimate / optimise / finalise loop.
///
/// The agent only learns about other robots through its LocalView and its
/// inbox; every cross-robot quantity arrives by message with one step of delay.
class RobotAgent {
 public:
  RobotAgent(std::size_t id, Vec position, AgentConfig config, PlannerSettings settings);

  std::size_t id() const { return id_; }
  AgentPhase phase() const { return phase_; }
  const Vec& position() const { return position_; }
  const Vec& reference() const { return reference_; }
  const AgentConfig& config() const { return config_; }
  const AdjacencyEstimate& estimate() const { return estimate_; }
  const ConvergenceState& convergence() const { return convergence_; }
  const TradingState& trading() const { return trading_; }
  std::optional<double> lambda_hat() const { return lambda_hat_; }

  /// Advances the robot by one global step.
  StepOutput step(std::int64_t k, const LocalView& view, std::span<const MessageEnvelope> inbox,
                  EventLog& events);

  // One clamped step toward the reference; returns the displacement.
  Vec move_step();

  // Freezes the planning data for an optimisation period and zeroes trades.
  void begin_optimization(PlanningProblem problem, std::vector<std::size_t> nbrs);

  // Solve the local QP against the neighbours' previous trades and update mu.
  RoundOutcome dual_ascent_round(const Vec& neighbor_trades_prev);

  // Average the last exchanged trade pair, solve once more without trading,
  // and set the new reference from the first horizon input.
  FinalizeOutcome finalize(const Vec& neighbor_trades_final);

  double local_cost(const Vec& u) const;

  // Used by the centralized mode: take a reference and start moving.
  void command_reference(const Vec& reference);

  const std::optional<PlanningProblem>& problem() const { return problem_; }

 private:
  StepOutput step_move();
  StepOutput step_estimate(std::int64_t k, const LocalView& view, std::span<const MessageEnvelope> inbox,
                           EventLog& events);
  StepOutput step_optimize(std::int64_t k, std::span<const MessageEnvelope> inbox, EventLog& events);

  PlanningProblem build_problem(const LocalView& view, const FiedlerResult* fiedler,
                                const Vec& gradient) const;
  void enter_estimation();
  void send_trades(std::int64_t k, std::vector<MessageEnvelope>& out) const;

  std::size_t id_;
  Vec position_;
  Vec reference_;
  AgentConfig config_;
  PlannerSettings settings_;

  AgentPhase phase_ = AgentPhase::MoveToReference;
  int move_count_ = 0;
  AdjacencyEstimate estimate_;
  ConvergenceState convergence_;
  TradingState trading_;
  std::optional<PlanningProblem> problem_;
  std::optional<double> lambda_hat_;
  FiedlerResult fiedler_estimate_;
  Vec gradient_;
  int rounds_ = 0;
  bool dual_converged_ = false;
  bool cap_reported_ = false;
};

}  // namespace commplan
