#include "flockspc/controller.hpp"

#include <algorithm>
#include <cmath>

#include "flockspc/errors.hpp"

namespace flockspc {

std::string_view to_string(ControllerKind kind) {
  return kind == ControllerKind::Spc ? "SPC" : "PFC";
}

std::optional<ControllerKind> parse_controller_kind(std::string_view text) {
  if (text == "SPC" || text == "spc") return ControllerKind::Spc;
  if (text == "PFC" || text == "pfc") return ControllerKind::Pfc;
  return std::nullopt;
}

void ControllerConfig::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw InvalidInput("epsilon must be positive");
  }
  if (n_star < 1) {
    throw InvalidInput("n_star must be at least 1");
  }
  if (kind == ControllerKind::Pfc && (!(pfc_gain > 0.0) || !std::isfinite(pfc_gain))) {
    throw InvalidInput("pfc_gain must be positive");
  }
}

int dynamic_lookahead_count(int n_star, double dist_to_target) {
  const double factor = std::max(1.0, std::min(1.5 * (dist_to_target + 0.5), 3.0));
  return static_cast<int>(std::ceil(static_cast<double>(n_star) * factor));
}

std::vector<Vec3> build_candidate_set(const Vec3& self, const Vec3& gradient, double epsilon, int n) {
  const double norm = gradient.norm();
  if (!(norm > 0.0)) {
    throw DegenerateGradient("cannot build lookahead candidates along a zero gradient");
  }
  if (n < 1) {
    throw InvalidInput("candidate count must be at least 1");
  }
  const Vec3 step = gradient * (epsilon / norm);
  std::vector<Vec3> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int m = 1; m <= n; ++m) {
    out.push_back(self - step * static_cast<double>(m));
  }
  return out;
}

SpcDecision spc_decide(const Vec3& self, std::span<const Vec3> neighbors, const CostParams& params,
                       const ControllerConfig& cfg) {
  SpcDecision d;
  d.gradient = evaluate_gradient(self, neighbors, params);
  if (d.gradient.total.norm() < kHoldGradientNorm) {
    d.setpoint.position = self;
    return d;
  }

  int n = cfg.n_star;
  if (cfg.dynamic_n) {
    const double dist = params.target ? distance(self, *params.target) : 0.0;
    n = dynamic_lookahead_count(cfg.n_star, dist);
  }

  d.candidates = build_candidate_set(self, d.gradient.total, cfg.epsilon, n);
  d.candidate_costs.reserve(d.candidates.size());
  std::size_t best = 0;
  for (std::size_t m = 0; m < d.candidates.size(); ++m) {
    d.candidate_costs.push_back(evaluate_cost(d.candidates[m], neighbors, params).total);
    // strict: the nearest of equal-cost candidates is kept
    if (d.candidate_costs[m] < d.candidate_costs[best]) {
      best = m;
    }
  }
  d.chosen = best;
  d.setpoint.position = d.candidates[best];
  return d;
}

Setpoint spc_setpoint(const Vec3& self, std::span<const Vec3> neighbors, const CostParams& params,
                      const ControllerConfig& cfg) {
  if (cfg.kind != ControllerKind::Spc) {
    throw InvalidInput("spc_setpoint requires an SPC controller config");
  }
  return spc_decide(self, neighbors, params, cfg).setpoint;
}

Setpoint pfc_setpoint(const Vec3& self, std::span<const Vec3> neighbors, const CostParams& params,
                      const ControllerConfig& cfg) {
  if (cfg.kind != ControllerKind::Pfc) {
    throw InvalidInput("pfc_setpoint requires a PFC controller config");
  }
  const Vec3 grad = evaluate_gradient(self, neighbors, params).total;
  if (grad.norm() < kHoldGradientNorm) {
    return {self};
  }
  return {self - cfg.pfc_gain * grad};
}

Setpoint compute_setpoint(const Observation& obs, const CostParams& params, const ControllerConfig& cfg) {
  return cfg.kind == ControllerKind::Spc ? spc_setpoint(obs.self, obs.neighbors, params, cfg)
                                         : pfc_setpoint(obs.self, obs.neighbors, params, cfg);
}

}  // namespace flockspc
