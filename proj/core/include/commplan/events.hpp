#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace commplan {

struct Event {
  std::int64_t step = 0;
  std::string kind;
  std::string detail;
  bool violation = false;
};

using EventLog = std::vector<Event>;

// Event kinds that count as invariant violations.
namespace event_kind {
inline constexpr const char* kCollision = "collision";
inline constexpr const char* kFiedlerBelowBound = "fiedler_below_bound";
inline constexpr const char* kSeparationMismatch = "separation_mismatch";
inline constexpr const char* kPhaseDesync = "phase_desync";
inline constexpr const char* kFatal = "fatal";
// Informational.
inline constexpr const char* kFiedlerMultiplicity = "fiedler_multiplicity";
inline constexpr const char* kEstimateMismatch = "estimate_mismatch";
inline constexpr const char* kDualAscentCap = "dual_ascent_cap";
inline constexpr const char* kRoundFailed = "round_failed";
inline constexpr const char* kFinalFallback = "final_fallback";
inline constexpr const char* kOracleInfeasible = "oracle_infeasible";
inline constexpr const char* kMissingMessage = "missing_message";
}  // namespace event_kind

}  // namespace commplan
