#pragma once

#include "logitbench/harness.hpp"

#include <json.hpp>

#include <iosfwd>

namespace logitbench {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr const char* kOutDirEnv = "LOGITBENCH_OUT";

nlohmann::json to_json(const HarnessConfig& config);
HarnessConfig harness_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ScenarioConfig& s);
ScenarioConfig scenario_from_json(const nlohmann::json& j, std::uint64_t master_seed);

/// Entry point of the command-line tool. Subcommands: simulate, apply, fit.
/// Returns the process exit status; 0 only if all requested work completed
/// and was persisted.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace logitbench
