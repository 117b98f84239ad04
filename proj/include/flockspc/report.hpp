#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "flockspc/metrics.hpp"
#include "flockspc/scenario.hpp"

namespace flockspc {

struct ObstacleScenario {
  std::string name;
  std::vector<Obstacle> obstacles;
};

/// Experiment grid: every combination of flock size, obstacle layout,
/// controller, LLC family and seed is one run.
struct SweepSpec {
  std::vector<int> flock_sizes;
  std::vector<ObstacleScenario> obstacle_scenarios;
  std::vector<ControllerKind> controllers;
  std::vector<LlcFamily> llc_families;
  std::vector<std::uint64_t> seeds;
  /// Scenario every run starts from (waypoints, cost, timing, ...).
  ScenarioConfig base = reference_scenario(0, 4);
  /// Apply the tabulated per-family N* and PFC gain.
  bool family_presets = true;

  void validate() const;
  std::size_t run_count() const;
};

/// Keys: flock_sizes, obstacle_scenarios (names "none"/"three"/"eleven" or
/// {name, obstacles} objects), controllers, llc_families, seeds, and
/// optionally base (inline scenario object) and family_presets.
SweepSpec sweep_from_json(const nlohmann::json& j);

/// Runs in row-major order: size, obstacles, controller, llc, seed.
std::vector<ScenarioConfig> expand_sweep(const SweepSpec& spec);

/// Runs every configuration with at most `threads` scenarios in flight.
/// Results are in expand_sweep order regardless of `threads`.
std::vector<RunSummary> run_sweep(const SweepSpec& spec, int threads);

/// Table with one row per (|D|, obstacle count) and, for each controller x
/// LLC column group, dist_min / comp_max / clear_obj. Cells aggregate the
/// worst case across seeds; verdicts render as "pass"/"FAIL" markers and
/// absent metrics as "-".
std::string markdown_table(const std::vector<RunSummary>& runs);

/// Per-cell min and median across seeds of each metric, plus the worst-case
/// verdicts, as JSON.
nlohmann::json sweep_table_json(const std::vector<RunSummary>& runs);

}  // namespace flockspc
