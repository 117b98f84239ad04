#include "flockspc/llc.hpp"

#include <algorithm>
#include <cmath>

#include "flockspc/errors.hpp"

namespace flockspc {

std::string_view to_string(LlcFamily family) { return family == LlcFamily::A ? "A" : "B"; }

std::optional<LlcFamily> parse_llc_family(std::string_view text) {
  if (text == "A" || text == "a") return LlcFamily::A;
  if (text == "B" || text == "b") return LlcFamily::B;
  return std::nullopt;
}

LlcConfig LlcConfig::defaults(LlcFamily family) {
  LlcConfig cfg;
  cfg.family = family;
  return cfg;
}

void LlcConfig::validate() const {
  if (!(tilt_min < 0.0) || !(tilt_max > 0.0)) {
    throw InvalidInput("tilt limits must satisfy tilt_min < 0 < tilt_max");
  }
  if (tilt_max >= M_PI / 2 || tilt_min <= -M_PI / 2) {
    throw InvalidInput("tilt limits must stay inside (-pi/2, pi/2)");
  }
  if (!(t_delta > 0.0)) {
    throw InvalidInput("t_delta must be positive");
  }
  if (!(k_v >= 0.0) || !(k_p >= 0.0) || !(k_i >= 0.0)) {
    throw InvalidInput("k_v, k_p, k_i must be non-negative");
  }
  if (!(z_accel_max > 0.0)) {
    throw InvalidInput("z_accel_max must be positive");
  }
  if (!(z_time_constant > 0.0)) {
    throw InvalidInput("z_time_constant must be positive");
  }
}

namespace {

double pid_axis(double ref, double pos, double vel, double& integrator, const LlcConfig& cfg, double dt) {
  const double e = (ref - pos) - cfg.k_v * vel;
  const double next_integrator = integrator + e * dt;
  const double raw = cfg.k_p * e + cfg.k_i * next_integrator;
  const double tilt = std::clamp(raw, cfg.tilt_min, cfg.tilt_max);
  if (tilt == raw) {
    integrator = next_integrator;
  }
  return tilt;
}

double explicit_axis(double ref, double pos, double vel, const LlcConfig& cfg) {
  const double e = ref - pos;
  const double accel = (e - vel * cfg.t_delta) / (cfg.t_delta * cfg.t_delta);
  return std::clamp(std::atan(accel / kGravity), cfg.tilt_min, cfg.tilt_max);
}

}  // namespace

Vec2 pid_xy_tilt(PlantState& state, Vec2 ref_xy, const LlcConfig& cfg, double dt) {
  return {pid_axis(ref_xy.x, state.position.x, state.velocity.x, state.integrator.x, cfg, dt),
          pid_axis(ref_xy.y, state.position.y, state.velocity.y, state.integrator.y, cfg, dt)};
}

Vec2 explicit_xy_tilt(const PlantState& state, Vec2 ref_xy, const LlcConfig& cfg) {
  return {explicit_axis(ref_xy.x, state.position.x, state.velocity.x, cfg),
          explicit_axis(ref_xy.y, state.position.y, state.velocity.y, cfg)};
}

PlantState integrate_plant(const PlantState& state, Vec2 tilt_xy, double z_ref, double z_time_constant, double dt,
                           double z_accel_max) {
  PlantState next = state;
  const double omega = 1.0 / z_time_constant;
  const Vec3 accel{kGravity * std::tan(tilt_xy.x), kGravity * std::tan(tilt_xy.y),
                   std::clamp(omega * omega * (z_ref - state.position.z) - 2.0 * omega * state.velocity.z, -z_accel_max,
                              z_accel_max)};
  next.velocity += accel * dt;
  next.position += next.velocity * dt;
  return next;
}

PlantState step_agent(PlantState state, const Vec3& ref, const LlcConfig& cfg, double dt) {
  const Vec2 tilt = cfg.family == LlcFamily::A ? pid_xy_tilt(state, ref.xy(), cfg, dt)
                                               : explicit_xy_tilt(state, ref.xy(), cfg);
  return integrate_plant(state, tilt, ref.z, cfg.z_time_constant, dt, cfg.z_accel_max);
}

StepResponse simulate_step(const LlcConfig& cfg, double step, double duration, double dt) {
  cfg.validate();
  if (!(step >= 0.0) || !(duration > 0.0) || !(dt > 0.0)) {
    throw InvalidInput("step must be non-negative, duration and dt positive");
  }
  StepResponse out;
  const auto steps = static_cast<long>(std::llround(duration / dt));
  out.samples.reserve(static_cast<std::size_t>(steps) + 1);

  PlantState state;
  const Vec3 ref{step, 0.0, 0.0};
  out.samples.push_back({0.0, 0.0, 0.0, 0.0});
  for (long k = 1; k <= steps; ++k) {
    const Vec2 tilt = cfg.family == LlcFamily::A ? pid_xy_tilt(state, ref.xy(), cfg, dt)
                                                 : explicit_xy_tilt(state, ref.xy(), cfg);
    state = integrate_plant(state, tilt, 0.0, cfg.z_time_constant, dt, cfg.z_accel_max);
    out.samples.push_back({static_cast<double>(k) * dt, state.position.x, state.velocity.x, tilt.x});
  }

  if (step == 0.0) {
    return out;
  }

  auto& m = out.metrics;
  const auto& s = out.samples;
  m.rise_time_90 = duration;
  m.settled = false;
  for (const auto& sample : s) {
    if (sample.position >= 0.9 * step) {
      m.rise_time_90 = sample.time;
      m.settled = true;
      break;
    }
  }
  double peak = 0.0;
  for (const auto& sample : s) peak = std::max(peak, sample.position);
  m.overshoot_pct = std::max(0.0, (peak - step) / step * 100.0);

  const double band = 0.02 * step;
  m.settling_time_2pct = 0.0;
  for (std::size_t k = s.size(); k-- > 0;) {
    if (std::abs(s[k].position - step) > band) {
      if (k + 1 == s.size()) {
        m.settled = false;
        m.settling_time_2pct = duration;
      } else {
        m.settling_time_2pct = s[k + 1].time;
      }
      break;
    }
  }
  return out;
}

StepResponseMetrics step_response(const LlcConfig& cfg, double step, double duration, double dt) {
  return simulate_step(cfg, step, duration, dt).metrics;
}

}  // namespace flockspc
