#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "flockspc/flock_model.hpp"
#include "flockspc/vec3.hpp"

namespace flockspc {

enum class ControllerKind { Spc, Pfc };

std::string_view to_string(ControllerKind kind);
std::optional<ControllerKind> parse_controller_kind(std::string_view text);

struct ControllerConfig {
  ControllerKind kind = ControllerKind::Spc;
  /// Spacing between lookahead candidates (m).
  double epsilon = 0.06;
  /// Base candidate count N*.
  int n_star = 5;
  /// PFC gain k (m); only read when kind == Pfc.
  double pfc_gain = 0.007;
  /// Scale the candidate count with distance to the target.
  bool dynamic_n = true;

  void validate() const;
};

/// Reference position handed to the low-level controller.
struct Setpoint {
  Vec3 position;
};

/// What an agent sees at a control tick: its own observed position and the
/// observed positions of its neighbours. Controllers receive nothing else
/// besides the shared CostParams (weights, target, obstacle map).
struct Observation {
  Vec3 self;
  std::vector<Vec3> neighbors;
};

/// Below this gradient norm the controllers hold position.
inline constexpr double kHoldGradientNorm = 1e-9;

/// ceil(n_star * max(1, min(1.5 * (dist + 0.5), 3))), in [n_star, 3 n_star].
int dynamic_lookahead_count(int n_star, double dist_to_target);

/// Points self - m * epsilon * gradient / |gradient| for m = 1..n.
/// Throws DegenerateGradient for a zero gradient.
std::vector<Vec3> build_candidate_set(const Vec3& self, const Vec3& gradient, double epsilon, int n);

/// Full SPC decision for one agent, kept for auditing and tracing.
struct SpcDecision {
  Setpoint setpoint;
  GradientBreakdown gradient;
  std::vector<Vec3> candidates;
  std::vector<double> candidate_costs;
  /// Index into candidates, empty when the agent held position.
  std::optional<std::size_t> chosen;
};

SpcDecision spc_decide(const Vec3& self, std::span<const Vec3> neighbors, const CostParams& params,
                       const ControllerConfig& cfg);

/// Minimum-cost lookahead candidate (nearest wins ties); holds position when
/// the gradient vanishes.
Setpoint spc_setpoint(const Vec3& self, std::span<const Vec3> neighbors, const CostParams& params,
                      const ControllerConfig& cfg);

/// self - k * gradient, the unnormalised potential-field step.
Setpoint pfc_setpoint(const Vec3& self, std::span<const Vec3> neighbors, const CostParams& params,
                      const ControllerConfig& cfg);

/// Dispatches on cfg.kind.
Setpoint compute_setpoint(const Observation& obs, const CostParams& params, const ControllerConfig& cfg);

}  // namespace flockspc
