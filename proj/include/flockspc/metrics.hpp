#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flockspc/controller.hpp"
#include "flockspc/flock_model.hpp"
#include "flockspc/llc.hpp"
#include "flockspc/sim.hpp"

namespace flockspc {

struct MetricsSample {
  double time = 0.0;
  /// Minimum pairwise distance; absent with fewer than two agents.
  std::optional<double> dist_min;
  /// Maximum distance of any agent from the flock centroid.
  double comp_max = 0.0;
  /// Minimum xy distance from any agent to any obstacle centre; absent
  /// without obstacles.
  std::optional<double> clear_obj;
};

struct Thresholds {
  double dist_thr = 0.0;
  double comp_thr = 0.0;
  double clear_thr = 0.0;
};

/// Metrics of one configuration of true positions.
MetricsSample compute_metrics(std::span<const Vec3> positions, std::span<const Obstacle> obstacles,
                              double time = 0.0);

/// dist_thr = 2 r_drone + r_safety, clear_thr = r_drone + r_k + r_safety.
Thresholds thresholds_from_geometry(double r_drone, double r_safety, double r_k, double comp_thr);

/// Thresholds of a scenario, using its largest obstacle radius for r_k.
Thresholds thresholds_for(const ScenarioConfig& cfg);

struct RunSummary {
  std::string scenario;
  int agent_count = 0;
  int obstacle_count = 0;
  ControllerKind controller = ControllerKind::Spc;
  LlcFamily llc = LlcFamily::A;
  std::uint64_t seed = 0;
  double formation_time = 0.0;
  std::size_t samples = 0;
  Thresholds thresholds;

  std::optional<double> min_dist_min;
  double max_comp_max = 0.0;
  std::optional<double> min_clear_obj;

  std::optional<bool> dist_pass;
  bool comp_pass = true;
  std::optional<bool> clear_pass;

  /// Samples in the window that individually violated each threshold.
  std::size_t dist_violations = 0;
  std::size_t comp_violations = 0;
  std::size_t clear_violations = 0;

  bool all_pass() const {
    return dist_pass.value_or(true) && comp_pass && clear_pass.value_or(true);
  }
};

/// Min/max of the samples with time >= formation_time and strict verdicts:
/// pass iff min(dist_min) > dist_thr, max(comp_max) < comp_thr and
/// min(clear_obj) > clear_thr. Throws std::invalid_argument if the window
/// is empty.
RunSummary aggregate(std::span<const MetricsSample> samples, const Thresholds& thresholds, double formation_time);

/// Metrics over every record of a trace (true positions), with the scenario
/// identifiers filled in from trace.config.
RunSummary aggregate(const Trace& trace, const Thresholds& thresholds, double formation_time);

std::vector<MetricsSample> trace_metrics(const Trace& trace);

}  // namespace flockspc
