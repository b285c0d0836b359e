#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "commplan/scenario.hpp"

namespace commplan {

/// Raised when a scenario file cannot be turned into a valid config. Carries
/// every problem found, each prefixed with the offending field path.
class ScenarioError : public std::runtime_error {
 public:
  explicit ScenarioError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

// JSON scenario format; see README for the key list.
ScenarioConfig parse_scenario_text(const std::string& text);
ScenarioConfig parse_scenario(const std::filesystem::path& path);

std::string serialize_scenario(const ScenarioConfig& config);

}  // namespace commplan
