#include "flockspc/scenario.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "flockspc/errors.hpp"

namespace flockspc {
namespace {

template <typename Fn>
void check_section(const char* field, Fn&& validate) {
  try {
    validate();
  } catch (const InvalidInput& e) {
    throw ConfigError(field, e.what());
  }
}

}  // namespace

int ScenarioConfig::steps_per_control() const {
  return static_cast<int>(std::llround(control_period / physics_dt));
}

long ScenarioConfig::total_steps() const { return static_cast<long>(std::llround(duration / physics_dt)); }

void ScenarioConfig::validate() const {
  if (agent_count < 1) throw ConfigError("agent_count", "must be at least 1");
  if (!(physics_dt > 0.0) || !std::isfinite(physics_dt)) throw ConfigError("physics_dt", "must be positive");
  if (!(control_period >= physics_dt) || !std::isfinite(control_period)) {
    throw ConfigError("control_period", "must be >= physics_dt");
  }
  const double ratio = control_period / physics_dt;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio) {
    throw ConfigError("control_period", "must be an integer multiple of physics_dt");
  }
  if (!(duration > 0.0) || !std::isfinite(duration)) throw ConfigError("duration", "must be positive");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) throw ConfigError("noise_sigma", "must be >= 0");
  if (!(r_h > 0.0)) throw ConfigError("r_h", "must be positive (or infinite)");
  if (observation_delay < 0) throw ConfigError("observation_delay", "must be >= 0");
  if (!(formation_time >= 0.0)) throw ConfigError("formation_time", "must be >= 0");
  if (!(r_safety >= 0.0)) throw ConfigError("r_safety", "must be >= 0");
  if (!(comp_thr > 0.0)) throw ConfigError("comp_thr", "must be positive");

  for (std::size_t i = 1; i < waypoints.size(); ++i) {
    if (waypoints[i].time < waypoints[i - 1].time) {
      throw ConfigError("waypoints[" + std::to_string(i) + "].time", "waypoint times must be non-decreasing");
    }
  }
  for (std::size_t i = 0; i < waypoints.size(); ++i) {
    if (!waypoints[i].target.is_finite() || !std::isfinite(waypoints[i].time)) {
      throw ConfigError("waypoints[" + std::to_string(i) + "]", "must be finite");
    }
  }
  for (std::size_t i = 0; i < obstacles.size(); ++i) {
    if (!(obstacles[i].radius > 0.0)) {
      throw ConfigError("obstacles[" + std::to_string(i) + "].radius", "must be positive");
    }
  }

  if (spawn_positions) {
    if (static_cast<int>(spawn_positions->size()) != agent_count) {
      throw ConfigError("spawn.positions", "must list exactly agent_count positions");
    }
    for (const auto& p : *spawn_positions) {
      if (!p.is_finite()) throw ConfigError("spawn.positions", "positions must be finite");
    }
  } else {
    const auto& b = spawn_box;
    if (!(b.min.x <= b.max.x && b.min.y <= b.max.y && b.min.z <= b.max.z) || !b.min.is_finite() ||
        !b.max.is_finite()) {
      throw ConfigError("spawn.box_min", "box_min must be <= box_max component-wise");
    }
    if (!(b.min_spacing >= 0.0)) throw ConfigError("spawn.min_spacing", "must be >= 0");
  }

  check_section("cost", [&] { cost.validate(); });
  check_section("controller", [&] { controller.validate(); });
  check_section("llc", [&] { llc.validate(); });
}

std::optional<Vec3> active_target(const std::vector<Waypoint>& waypoints, double t) {
  std::optional<Vec3> target;
  // Absorb the rounding of t = k * physics_dt.
  for (const auto& w : waypoints) {
    if (w.time <= t + 1e-9) {
      target = w.target;
    } else {
      break;
    }
  }
  return target;
}

void apply_family_preset(ScenarioConfig& cfg, LlcFamily family) {
  cfg.llc = LlcConfig::defaults(family);
  if (family == LlcFamily::A) {
    cfg.controller.n_star = 5;
    cfg.controller.pfc_gain = 0.007;
  } else {
    cfg.controller.n_star = 3;
    cfg.controller.pfc_gain = 0.005;
  }
}

std::vector<Obstacle> reference_obstacles(int count) {
  switch (count) {
    case 0:
      return {};
    case 3:
      // one on the first leg, a gate on the second
      return {{{4.0, 0.0}, 0.15}, {{6.9, 4.0}, 0.15}, {{9.1, 4.0}, 0.15}};
    case 11:
      return {{{2.0, 0.8}, 0.15},  {{2.0, -0.8}, 0.15}, {{4.0, 0.0}, 0.15}, {{6.0, 0.8}, 0.15},
              {{6.0, -0.8}, 0.15}, {{7.2, 2.5}, 0.15},  {{8.8, 2.5}, 0.15}, {{8.0, 4.0}, 0.15},
              {{7.2, 5.5}, 0.15},  {{8.8, 5.5}, 0.15},  {{8.0, 7.0}, 0.15}};
    default:
      throw InvalidInput("reference layouts exist for 0, 3 and 11 obstacles");
  }
}

std::vector<Waypoint> reference_waypoints() {
  std::vector<Waypoint> w;
  w.push_back({0.0, {0.0, 0.0, 1.0}});
  // 1 m every 2 s: east along y = 0, then north along x = 8.
  for (int i = 1; i <= 8; ++i) {
    w.push_back({10.0 + 2.0 * (i - 1), {static_cast<double>(i), 0.0, 1.0}});
  }
  for (int i = 1; i <= 8; ++i) {
    w.push_back({26.0 + 2.0 * (i - 1), {8.0, static_cast<double>(i), 1.0}});
  }
  return w;
}

ScenarioConfig reference_scenario(int obstacle_count, int agent_count) {
  ScenarioConfig cfg;
  cfg.name = "reference_" + std::to_string(obstacle_count) + "_obstacles";
  cfg.agent_count = agent_count;
  cfg.obstacles = reference_obstacles(obstacle_count);
  cfg.waypoints = reference_waypoints();
  apply_family_preset(cfg, LlcFamily::A);
  return cfg;
}

ScenarioConfig hardware_preset(int agent_count) {
  ScenarioConfig cfg;
  cfg.name = "hardware_preset";
  cfg.agent_count = agent_count;
  cfg.cost.w_obs = 0.0;
  cfg.controller.epsilon = 0.025;
  cfg.controller.n_star = 3;
  cfg.waypoints = {{0.0, {0.0, 0.0, 1.0}}};
  cfg.duration = 30.0;
  return cfg;
}

ScenarioConfig two_agent_scenario(double w_coh, double w_sep, double r_drone) {
  ScenarioConfig cfg;
  cfg.name = "two_agent_equilibrium";
  cfg.agent_count = 2;
  cfg.spawn_positions = std::vector<Vec3>{{0.0, 0.0, 1.0}, {2.0, 0.0, 1.0}};
  cfg.cost.w_coh = w_coh;
  cfg.cost.w_sep = w_sep;
  cfg.cost.w_tar = 0.0;
  cfg.cost.w_obs = 0.0;
  cfg.cost.r_drone = r_drone;
  cfg.r_h = std::numeric_limits<double>::infinity();
  cfg.noise_sigma = 0.0;
  cfg.duration = 30.0;
  cfg.formation_time = 0.0;
  return cfg;
}

}  // namespace flockspc
