#pragma once

#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "flockspc/vec3.hpp"

namespace flockspc {

inline constexpr double kGravity = 9.81;

/// A: PID on a velocity-damped position error. B: explicit controller that
/// solves for the constant acceleration closing the error over t_delta.
enum class LlcFamily { A, B };

std::string_view to_string(LlcFamily family);
std::optional<LlcFamily> parse_llc_family(std::string_view text);

struct LlcConfig {
  LlcFamily family = LlcFamily::A;
  double k_v = 1.4;     // s
  double k_p = 0.08;    // rad/m
  double k_i = 0.005;   // rad/(m s)
  double tilt_min = -0.35;
  double tilt_max = 0.35;
  double t_delta = 0.5;  // s
  double z_time_constant = 0.4;
  /// Vertical acceleration bound; defaults to g tan(0.35), the horizontal limit.
  double z_accel_max = 3.5828;

  static LlcConfig defaults(LlcFamily family);
  void validate() const;
};

struct PlantState {
  Vec3 position;
  Vec3 velocity;
  Vec2 integrator;  // m s
  double mass = 0.031;
};

/// Family A tilt command. Updates state.integrator (frozen per axis while
/// that axis saturates).
Vec2 pid_xy_tilt(PlantState& state, Vec2 ref_xy, const LlcConfig& cfg, double dt);

/// Family B tilt command: a = (e - v t_delta) / t_delta^2, phi = atan(a / g).
Vec2 explicit_xy_tilt(const PlantState& state, Vec2 ref_xy, const LlcConfig& cfg);

/// Tilt-driven point mass. Horizontal a = g tan(tilt), semi-implicit Euler;
/// z is a critically damped second-order lag toward z_ref with its
/// acceleration clamped to +-z_accel_max.
PlantState integrate_plant(const PlantState& state, Vec2 tilt_xy, double z_ref, double z_time_constant, double dt,
                           double z_accel_max = std::numeric_limits<double>::infinity());

/// One LLC + plant step toward `ref`: computes the tilt for cfg.family and
/// integrates by dt.
PlantState step_agent(PlantState state, const Vec3& ref, const LlcConfig& cfg, double dt);

struct StepResponseMetrics {
  double rise_time_90 = 0.0;
  double overshoot_pct = 0.0;
  double settling_time_2pct = 0.0;
  bool settled = true;
};

struct StepResponseSample {
  double time = 0.0;
  double position = 0.0;
  double velocity = 0.0;
  double tilt = 0.0;
};

struct StepResponse {
  StepResponseMetrics metrics;
  std::vector<StepResponseSample> samples;
};

/// Single-axis step from rest at the origin to `step`.
StepResponse simulate_step(const LlcConfig& cfg, double step, double duration, double dt);

StepResponseMetrics step_response(const LlcConfig& cfg, double step, double duration, double dt);

}  // namespace flockspc
