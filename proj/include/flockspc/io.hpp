#pragma once

#include <filesystem>
#include <iosfwd>

#include "json.hpp"

#include "flockspc/llc.hpp"
#include "flockspc/metrics.hpp"
#include "flockspc/scenario.hpp"
#include "flockspc/sim.hpp"

namespace flockspc {

/// Parses a scenario object. Every key is optional except agent_count;
/// unknown keys are rejected. Throws ConfigError naming the key path.
ScenarioConfig scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const ScenarioConfig& cfg);

/// Reads and parses a scenario file; malformed JSON is a ConfigError too.
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Reads a JSON document, mapping I/O and syntax errors to ConfigError.
nlohmann::json read_json_file(const std::filesystem::path& path);

/// One row per agent per control tick.
void write_trace_csv(std::ostream& out, const Trace& trace);

nlohmann::json summary_to_json(const RunSummary& summary);

void write_step_response_csv(std::ostream& out, const StepResponse& response);
nlohmann::json step_metrics_to_json(const StepResponseMetrics& metrics);

}  // namespace flockspc
