#pragma once

#include <optional>
#include <span>
#include <vector>

#include "flockspc/vec3.hpp"

namespace flockspc {

/// Infinitely tall cylinder, described by its footprint on the xy-plane.
struct Obstacle {
  Vec2 center;
  double radius = 0.15;
};

struct CostParams {
  double w_coh = 20.0;
  double w_sep = 9.0;
  double w_tar = 150.0;
  double w_obs = 12.0;
  double r_drone = 0.07;
  /// Flock target; no target means the target term is 0.
  std::optional<Vec3> target;
  std::vector<Obstacle> obstacles;
  /// Lower clamp for clearance denominators.
  double zero_hat = 1e-6;

  /// Throws InvalidInput on negative weights, negative radii, zero_hat <= 0.
  void validate() const;
};

struct CostBreakdown {
  double coh = 0.0;
  double sep = 0.0;
  double tar = 0.0;
  double obs = 0.0;
  double total = 0.0;
};

struct GradientBreakdown {
  Vec3 coh;
  Vec3 sep;
  Vec3 tar;
  Vec3 obs;
  Vec3 total;
};

/// Positional flocking cost of an agent at `self` given the observed
/// positions of its neighbours. Cohesion and separation are averaged over the
/// neighbourhood, the target term uses the centroid of self + neighbours, and
/// the obstacle term is averaged over all obstacles using xy-projected
/// distances. An empty neighbourhood contributes no cohesion/separation.
CostBreakdown evaluate_cost(const Vec3& self, std::span<const Vec3> neighbors, const CostParams& params);

/// Closed-form gradient of evaluate_cost with respect to `self`.
///
/// Inside a clearance clamp (separation distance <= 2 r_drone + zero_hat, or
/// obstacle clearance <= r_k + r_drone + zero_hat) the denominator uses
/// zero_hat, so the gradient stays finite and keeps pushing outward. Exactly
/// coincident points repel along +x.
GradientBreakdown evaluate_gradient(const Vec3& self, std::span<const Vec3> neighbors, const CostParams& params);

/// Central-difference gradient of evaluate_cost(...).total with step `h`.
Vec3 finite_difference_gradient(const Vec3& self, std::span<const Vec3> neighbors, const CostParams& params,
                                double h);

/// Separation of two agents at which the cohesion and separation gradients
/// cancel: the root d > 2 r_drone of w_coh * d * (d - 2 r_drone)^3 = w_sep.
/// Exact fourth root for r_drone = 0, bisection (1e-9 m) otherwise.
double equilibrium_distance(double w_coh, double w_sep, double r_drone);

}  // namespace flockspc
