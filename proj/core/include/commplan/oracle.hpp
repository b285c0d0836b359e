#pragma once

#include <vector>

#include "commplan/scenario.hpp"

namespace commplan {

/// Ground-truth planning data for all robots at one instant.
struct Snapshot {
  std::vector<Vec> positions;
  double lambda2 = 0.0;
  FiedlerResult fiedler;
  std::vector<Vec> gradients;  // m_i per robot
};

Snapshot make_snapshot(const ScenarioConfig& config, std::span<const Vec> positions);

struct OracleResult {
  std::vector<Vec> inputs;  // U_i per robot
  double objective = 0.0;
  SolveStatus status = SolveStatus::Infeasible;

  bool optimal() const { return status == SolveStatus::Optimal; }
};

/// One QP over every robot's stacked inputs: summed horizon costs, the global
/// linearised connectivity budget, all pairwise hyperplanes and the input box.
OracleResult centralized_oracle(const ScenarioConfig& config, const Snapshot& snapshot);

struct GroundTruth {
  double lambda2 = 0.0;
  double min_distance = 0.0;  // +inf for a single robot
};

GroundTruth ground_truth_metrics(std::span<const Vec> positions, const LinkParams& link);

}  // namespace commplan
