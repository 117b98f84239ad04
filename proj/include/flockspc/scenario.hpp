#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "flockspc/controller.hpp"
#include "flockspc/flock_model.hpp"
#include "flockspc/llc.hpp"
#include "flockspc/vec3.hpp"

namespace flockspc {

struct SpawnBox {
  Vec3 min{-1.5, -1.5, 0.8};
  Vec3 max{1.5, 1.5, 1.2};
  double min_spacing = 0.4;
};

struct Waypoint {
  double time = 0.0;
  Vec3 target;
};

/// Complete description of one deterministic rollout. The obstacle list and
/// the active waypoint are copied into the cost parameters at run time;
/// `cost.target` and `cost.obstacles` are ignored here.
struct ScenarioConfig {
  std::string name = "scenario";
  int agent_count = 1;
  SpawnBox spawn_box;
  /// Explicit spawn positions; when set, overrides spawn_box.
  std::optional<std::vector<Vec3>> spawn_positions;
  std::vector<Obstacle> obstacles;
  std::vector<Waypoint> waypoints;
  CostParams cost;
  ControllerConfig controller;
  LlcConfig llc;
  /// Neighbourhood radius; infinity means every agent sees every other.
  double r_h = 0.9;
  double noise_sigma = 0.1;
  double physics_dt = 0.01;
  double control_period = 0.1;
  double duration = 60.0;
  std::uint64_t seed = 0;
  /// Observations lag the world by this many control ticks.
  int observation_delay = 0;
  /// Metrics ignore samples before this time.
  double formation_time = 10.0;
  double r_safety = 0.06;
  double comp_thr = 10.0;

  /// Throws ConfigError naming the offending field.
  void validate() const;

  /// Physics steps per control tick (validated to be an integer).
  int steps_per_control() const;
  long total_steps() const;
};

/// Active target at time t: the last waypoint whose time is <= t.
std::optional<Vec3> active_target(const std::vector<Waypoint>& waypoints, double t);

/// Sets the per-family LLC defaults and the matching tabulated controller
/// parameters (N* = 5, k = 0.007 for A; N* = 3, k = 0.005 for B).
void apply_family_preset(ScenarioConfig& cfg, LlcFamily family);

/// Obstacle layouts for the three reference courses: 0, 3 or 11 cylinders
/// along an L-shaped path. Coordinates are hand-placed.
std::vector<Obstacle> reference_obstacles(int count);

/// The L-shaped timed target path shared by all reference courses.
std::vector<Waypoint> reference_waypoints();

/// Reference course with `obstacle_count` in {0, 3, 11}, LLC family A preset.
ScenarioConfig reference_scenario(int obstacle_count, int agent_count);

/// Parameter preset of the hardware column: epsilon 0.025 m, N* = 3, no
/// obstacle term, hover at a single target.
ScenarioConfig hardware_preset(int agent_count);

/// Two agents spawned 2 m apart with only cohesion and separation active,
/// noise off and no target; used to check the equilibrium separation.
ScenarioConfig two_agent_scenario(double w_coh, double w_sep, double r_drone);

}  // namespace flockspc
