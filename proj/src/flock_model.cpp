#include "flockspc/flock_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "flockspc/errors.hpp"

namespace flockspc {
namespace {

void require_finite(const Vec3& self, std::span<const Vec3> neighbors, const CostParams& params) {
  if (!self.is_finite()) {
    throw InvalidInput("agent position is not finite");
  }
  for (const auto& n : neighbors) {
    if (!n.is_finite()) {
      throw InvalidInput("neighbor position is not finite");
    }
  }
  if (params.target && !params.target->is_finite()) {
    throw InvalidInput("target position is not finite");
  }
}

Vec3 centroid_with_self(const Vec3& self, std::span<const Vec3> neighbors) {
  Vec3 sum = self;
  for (const auto& n : neighbors) {
    sum += n;
  }
  return sum / static_cast<double>(neighbors.size() + 1);
}

}  // namespace

void CostParams::validate() const {
  if (!(w_coh >= 0.0) || !(w_sep >= 0.0) || !(w_tar >= 0.0) || !(w_obs >= 0.0)) {
    throw InvalidInput("cost weights must be finite and non-negative");
  }
  if (!(r_drone >= 0.0) || !std::isfinite(r_drone)) {
    throw InvalidInput("r_drone must be finite and non-negative");
  }
  if (!(zero_hat > 0.0)) {
    throw InvalidInput("zero_hat must be positive");
  }
  for (const auto& o : obstacles) {
    if (!(o.radius > 0.0) || !std::isfinite(o.center.x) || !std::isfinite(o.center.y)) {
      throw InvalidInput("obstacle radius must be positive and its center finite");
    }
  }
}

CostBreakdown evaluate_cost(const Vec3& self, std::span<const Vec3> neighbors, const CostParams& params) {
  require_finite(self, neighbors, params);
  CostBreakdown c;

  if (!neighbors.empty()) {
    const double inv_count = 1.0 / static_cast<double>(neighbors.size());
    double coh = 0.0;
    double sep = 0.0;
    for (const auto& n : neighbors) {
      const Vec3 diff = self - n;
      coh += diff.squared_norm();
      const double gap = std::max(diff.norm() - 2.0 * params.r_drone, params.zero_hat);
      sep += 1.0 / (gap * gap);
    }
    if (params.w_coh != 0.0) c.coh = params.w_coh * inv_count * coh;
    if (params.w_sep != 0.0) c.sep = params.w_sep * inv_count * sep;
  }

  if (params.target && params.w_tar != 0.0) {
    c.tar = params.w_tar * (*params.target - centroid_with_self(self, neighbors)).squared_norm();
  }

  if (!params.obstacles.empty() && params.w_obs != 0.0) {
    double obs = 0.0;
    for (const auto& o : params.obstacles) {
      const double clearance = (self.xy() - o.center).norm() - o.radius - params.r_drone;
      const double gap = std::max(clearance, params.zero_hat);
      obs += 1.0 / (gap * gap);
    }
    c.obs = params.w_obs * obs / static_cast<double>(params.obstacles.size());
  }

  c.total = c.coh + c.sep + c.tar + c.obs;
  return c;
}

GradientBreakdown evaluate_gradient(const Vec3& self, std::span<const Vec3> neighbors,
                                    const CostParams& params) {
  require_finite(self, neighbors, params);
  GradientBreakdown g;

  if (!neighbors.empty()) {
    const double count = static_cast<double>(neighbors.size());
    Vec3 mean;
    Vec3 sep_sum;
    for (const auto& n : neighbors) {
      mean += n;
      const Vec3 toward = n - self;
      const double d = toward.norm();
      const double gap = std::max(d - 2.0 * params.r_drone, params.zero_hat);
      const double gap3 = gap * gap * gap;
      if (d > 0.0) {
        sep_sum += toward / (gap3 * d);
      } else {
        // Coincident: push self along +x, i.e. gradient along -x.
        sep_sum += Vec3{-1.0, 0.0, 0.0} / gap3;
      }
    }
    mean = mean / count;
    if (params.w_coh != 0.0) g.coh = 2.0 * params.w_coh * (self - mean);
    if (params.w_sep != 0.0) g.sep = (2.0 * params.w_sep / count) * sep_sum;
  }

  if (params.target && params.w_tar != 0.0) {
    const double k = static_cast<double>(neighbors.size() + 1);
    g.tar = (2.0 * params.w_tar / k) * (centroid_with_self(self, neighbors) - *params.target);
  }

  if (!params.obstacles.empty() && params.w_obs != 0.0) {
    Vec2 sum;
    const Vec2 p = self.xy();
    for (const auto& o : params.obstacles) {
      const Vec2 toward = o.center - p;
      const double d = toward.norm();
      const double gap = std::max(d - o.radius - params.r_drone, params.zero_hat);
      const double gap3 = gap * gap * gap;
      if (d > 0.0) {
        sum = sum + toward * (1.0 / (gap3 * d));
      } else {
        sum = sum + Vec2{-1.0 / gap3, 0.0};
      }
    }
    const double scale = 2.0 * params.w_obs / static_cast<double>(params.obstacles.size());
    g.obs = Vec3{scale * sum.x, scale * sum.y, 0.0};
  }

  g.total = g.coh + g.sep + g.tar + g.obs;
  return g;
}

Vec3 finite_difference_gradient(const Vec3& self, std::span<const Vec3> neighbors, const CostParams& params,
                                double h) {
  if (!(h > 0.0)) {
    throw InvalidInput("finite-difference step must be positive");
  }
  auto partial = [&](Vec3 axis) {
    const double plus = evaluate_cost(self + axis * h, neighbors, params).total;
    const double minus = evaluate_cost(self - axis * h, neighbors, params).total;
    return (plus - minus) / (2.0 * h);
  };
  return {partial({1, 0, 0}), partial({0, 1, 0}), partial({0, 0, 1})};
}

double equilibrium_distance(double w_coh, double w_sep, double r_drone) {
  if (!(w_coh > 0.0)) {
    throw NoEquilibrium("cohesion weight must be positive for a finite equilibrium");
  }
  if (!(w_sep > 0.0) || !std::isfinite(w_sep)) {
    throw InvalidInput("separation weight must be positive");
  }
  if (!(r_drone >= 0.0) || !std::isfinite(r_drone)) {
    throw InvalidInput("r_drone must be non-negative");
  }
  if (r_drone == 0.0) {
    return std::pow(w_sep / w_coh, 0.25);
  }

  const double offset = 2.0 * r_drone;
  auto excess = [&](double d) {
    const double gap = d - offset;
    return w_coh * d * gap * gap * gap - w_sep;
  };
  double lo = offset;
  double hi = offset + 1.0;
  while (excess(hi) < 0.0) {
    hi = offset + 2.0 * (hi - offset);
  }
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace flockspc
