#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "simrt/platform_profile.hpp"
#include "simrt/scheduler.hpp"
#include "simrt/sim_engine.hpp"

namespace simrt::cli {

enum ExitCode : int { kOk = 0, kSimulationError = 1, kInputError = 2 };

struct PolicyRun {
  Policy policy;
  Metrics metrics;
};

/// One row per requested policy; latency columns follow `units`.
struct RunReport {
  std::string profile;
  std::string scenario;
  std::uint64_t seed = 0;
  SetupMode setup_mode = SetupMode::Amortized;
  std::vector<UnitKind> units;
  std::vector<PolicyRun> runs;
};

std::string render_table(const RunReport& report);
std::string report_to_json(const RunReport& report);
RunReport report_from_json(std::string_view text);
std::string report_to_csv(const RunReport& report);

std::string render_preferences(const PlatformProfile& profile);
std::string render_breakdown(const std::map<UnitKind, PhaseTotals>& totals);

/// A readable file path, then `$SIMRT_PROFILE_DIR/<name>[.json]`, then a
/// builtin profile name. Throws NotFound.
PlatformProfile resolve_profile(const std::string& name_or_path);

/// Entry point shared by the `simrt` binary and the tests. `args` excludes
/// the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace simrt::cli
