#include "flockspc/metrics.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace flockspc {

MetricsSample compute_metrics(std::span<const Vec3> positions, std::span<const Obstacle> obstacles, double time) {
  MetricsSample s;
  s.time = time;
  if (positions.empty()) {
    return s;
  }

  if (positions.size() >= 2) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < positions.size(); ++i) {
      for (std::size_t j = i + 1; j < positions.size(); ++j) {
        best = std::min(best, distance(positions[i], positions[j]));
      }
    }
    s.dist_min = best;
  }

  Vec3 centroid;
  for (const auto& p : positions) centroid += p;
  centroid = centroid / static_cast<double>(positions.size());
  for (const auto& p : positions) {
    s.comp_max = std::max(s.comp_max, distance(centroid, p));
  }

  if (!obstacles.empty()) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : positions) {
      for (const auto& o : obstacles) {
        best = std::min(best, (p.xy() - o.center).norm());
      }
    }
    s.clear_obj = best;
  }
  return s;
}

Thresholds thresholds_from_geometry(double r_drone, double r_safety, double r_k, double comp_thr) {
  return {2.0 * r_drone + r_safety, comp_thr, r_drone + r_k + r_safety};
}

Thresholds thresholds_for(const ScenarioConfig& cfg) {
  double r_k = 0.0;
  for (const auto& o : cfg.obstacles) r_k = std::max(r_k, o.radius);
  return thresholds_from_geometry(cfg.cost.r_drone, cfg.r_safety, r_k, cfg.comp_thr);
}

RunSummary aggregate(std::span<const MetricsSample> samples, const Thresholds& thresholds, double formation_time) {
  RunSummary r;
  r.thresholds = thresholds;
  r.formation_time = formation_time;
  for (const auto& s : samples) {
    if (s.time < formation_time) continue;
    ++r.samples;
    if (s.dist_min) {
      r.min_dist_min = std::min(r.min_dist_min.value_or(*s.dist_min), *s.dist_min);
      if (!(*s.dist_min > thresholds.dist_thr)) ++r.dist_violations;
    }
    r.max_comp_max = std::max(r.max_comp_max, s.comp_max);
    if (!(s.comp_max < thresholds.comp_thr)) ++r.comp_violations;
    if (s.clear_obj) {
      r.min_clear_obj = std::min(r.min_clear_obj.value_or(*s.clear_obj), *s.clear_obj);
      if (!(*s.clear_obj > thresholds.clear_thr)) ++r.clear_violations;
    }
  }
  if (r.samples == 0) {
    throw std::invalid_argument("no metrics samples at or after the formation time");
  }
  if (r.min_dist_min) r.dist_pass = *r.min_dist_min > thresholds.dist_thr;
  r.comp_pass = r.max_comp_max < thresholds.comp_thr;
  if (r.min_clear_obj) r.clear_pass = *r.min_clear_obj > thresholds.clear_thr;
  return r;
}

std::vector<MetricsSample> trace_metrics(const Trace& trace) {
  std::vector<MetricsSample> out;
  out.reserve(trace.records.size());
  std::vector<Vec3> positions;
  for (const auto& rec : trace.records) {
    positions.clear();
    for (const auto& a : rec.agents) positions.push_back(a.position);
    out.push_back(compute_metrics(positions, trace.config.obstacles, rec.time));
  }
  return out;
}

RunSummary aggregate(const Trace& trace, const Thresholds& thresholds, double formation_time) {
  const auto samples = trace_metrics(trace);
  RunSummary r = aggregate(samples, thresholds, formation_time);
  const auto& cfg = trace.config;
  r.scenario = cfg.name;
  r.agent_count = cfg.agent_count;
  r.obstacle_count = static_cast<int>(cfg.obstacles.size());
  r.controller = cfg.controller.kind;
  r.llc = cfg.llc.family;
  r.seed = cfg.seed;
  return r;
}

}  // namespace flockspc
