#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace commplan {

struct RunRequest {
  std::filesystem::path scenario;
  std::filesystem::path out_dir = "out";
  std::string mode = "trading";  // trading | no_trading | centralized | all
  std::optional<std::uint64_t> seed;
  std::optional<int> max_cycles;
  bool quiet = false;
};

inline constexpr int kExitClean = 0;
inline constexpr int kExitViolations = 1;
inline constexpr int kExitFatal = 2;

/// Runs the requested modes, writes traces to out_dir/<mode>/ and prints a
/// summary. Returns 0 (clean), 1 (violation events) or 2 (fatal error).
int run_cli(const RunRequest& request, std::ostream& out, std::ostream& err);

// argv front end (CLI11); env vars COMMPLAN_SCENARIO, COMMPLAN_OUT, ... mirror the flags.
int cli_main(int argc, char** argv);

}  // namespace commplan
