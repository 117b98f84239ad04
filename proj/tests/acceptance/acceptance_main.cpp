// Acceptance suite: one PASS/FAIL line per criterion. Exit status is nonzero
// when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "oracles.hpp"

#include "flockspc/controller.hpp"
#include "flockspc/flock_model.hpp"
#include "flockspc/io.hpp"
#include "flockspc/llc.hpp"
#include "flockspc/metrics.hpp"
#include "flockspc/scenario.hpp"
#include "flockspc/sim.hpp"

using namespace flockspc;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Vec3 oracle_fd(const Vec3& p, const std::vector<Vec3>& nb, const CostParams& w, double h) {
  auto f = [&](Vec3 q) { return oracle::cost(q, nb, w); };
  Vec3 g;
  g.x = (f({p.x + h, p.y, p.z}) - f({p.x - h, p.y, p.z})) / (2 * h);
  g.y = (f({p.x, p.y + h, p.z}) - f({p.x, p.y - h, p.z})) / (2 * h);
  g.z = (f({p.x, p.y, p.z + h}) - f({p.x, p.y, p.z - h})) / (2 * h);
  return g;
}

Outcome gradient_correctness() {
  const auto start = Clock::now();
  std::mt19937_64 rng(1000);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const auto c = oracle::random_config(rng, 30, 11);
    const Vec3 g = evaluate_gradient(c.self, c.neighbors, c.params).total;
    const double scale = std::max(norm(g), 1.0);
    const Vec3 fd = finite_difference_gradient(c.self, c.neighbors, c.params, 1e-6);
    const Vec3 independent = oracle_fd(c.self, c.neighbors, c.params, 1e-6);
    worst = std::max({worst, norm(g - fd) / scale, norm(g - independent) / scale});
  }
  const double elapsed = seconds_since(start);
  return {worst < 1e-4 && elapsed < 10.0, fmt::format("max rel err {:.2e}, {:.2f} s", worst, elapsed)};
}

Outcome two_drone_equilibrium() {
  const auto cfg = two_agent_scenario(20, 9, 0);
  const Trace t = run_scenario(cfg);
  const double want = std::pow(9.0 / 20.0, 0.25);
  double worst = 0.0;
  double last = 0.0;
  for (const auto& r : t.records) {
    if (r.time < 25.0 || r.time > 30.0 + 1e-9) continue;
    last = distance(r.agents[0].position, r.agents[1].position);
    worst = std::max(worst, std::abs(last - want) / want);
  }
  return {worst < 0.05, fmt::format("d(30 s) = {:.5f} m vs {:.5f} m, worst rel err over 25-30 s {:.2f}%", last,
                                    want, 100 * worst)};
}

Outcome argmin_audit() {
  long decisions = 0;
  long violations = 0;
  long holds = 0;
  for (int obstacles : {0, 3, 11}) {
    for (LlcFamily family : {LlcFamily::A, LlcFamily::B}) {
      for (std::uint64_t seed : {0, 1}) {
        auto cfg = reference_scenario(obstacles, 9);
        apply_family_preset(cfg, family);
        cfg.seed = seed;
        RunOptions opts;
        opts.record_trace = false;
        opts.on_decision = [&](const DecisionEvent& e) {
          ++decisions;
          const auto d = spc_decide(e.observation.self, e.observation.neighbors, e.params, cfg.controller);
          if (!(d.setpoint.position == e.setpoint.position)) {
            ++violations;
            return;
          }
          if (!d.chosen) {
            ++holds;
            if (!(e.setpoint.position == e.observation.self)) ++violations;
            return;
          }
          bool member = false;
          double chosen_cost = 0.0;
          double best = INFINITY;
          for (const Vec3& c : d.candidates) {
            const double cost = oracle::cost(c, e.observation.neighbors, e.params);
            best = std::min(best, cost);
            if (c == e.setpoint.position) {
              member = true;
              chosen_cost = cost;
            }
          }
          if (!member || best < chosen_cost) ++violations;
        };
        run_scenario(cfg, opts);
      }
    }
  }
  return {violations == 0 && decisions > 0,
          fmt::format("{} decisions, {} holds, {} violations", decisions, holds, violations)};
}

Outcome dynamic_n_endpoints() {
  const int at_zero = dynamic_lookahead_count(5, 0.0);
  const int at_far = dynamic_lookahead_count(5, 1.5);
  const int beyond = dynamic_lookahead_count(5, 40.0);
  return {at_zero == 5 && at_far == 15 && beyond == 15,
          fmt::format("N(0) = {}, N(1.5) = {}, N(40) = {}", at_zero, at_far, beyond)};
}

Outcome llc_ordering() {
  const auto a = step_response(LlcConfig::defaults(LlcFamily::A), 1.0, 20.0, 0.001);
  const auto b = step_response(LlcConfig::defaults(LlcFamily::B), 1.0, 20.0, 0.001);
  const bool pass = b.rise_time_90 < 0.5 * a.rise_time_90 && b.overshoot_pct > a.overshoot_pct;
  return {pass, fmt::format("rise A {:.3f} s, B {:.3f} s; overshoot A {:.2f}%, B {:.2f}%", a.rise_time_90,
                            b.rise_time_90, a.overshoot_pct, b.overshoot_pct)};
}

Outcome stopping_distance() {
  const LlcConfig cfg = LlcConfig::defaults(LlcFamily::B);
  const double dt = 0.001;
  const double t99 = -cfg.t_delta * std::log(std::sqrt(0.01));
  PlantState s;
  s.velocity.x = 1.0;
  double at_t99 = NAN;
  for (long k = 1; k * dt <= 20.0; ++k) {
    s = integrate_plant(s, explicit_xy_tilt(s, s.position.xy(), cfg), 0.0, cfg.z_time_constant, dt, cfg.z_accel_max);
    if (std::isnan(at_t99) && k * dt >= t99 - 1e-12) at_t99 = s.position.x;
  }
  const double total = s.position.x;
  const bool pass = std::abs(total - 0.5) <= 0.02 * 0.5 && std::abs(at_t99 - 0.45) <= 0.01 * 0.45;
  return {pass, fmt::format("total {:.4f} m, {:.4f} m at t99 = {:.3f} s", total, at_t99, t99)};
}

Outcome flock_maintenance() {
  double worst_dist = INFINITY;
  double worst_comp = 0.0;
  double slowest = 0.0;
  bool pass = true;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto cfg = reference_scenario(0, 9);
    cfg.seed = seed;
    const auto start = Clock::now();
    const Trace t = run_scenario(cfg);
    slowest = std::max(slowest, seconds_since(start));
    const auto r = aggregate(t, thresholds_for(cfg), 10.0);
    worst_dist = std::min(worst_dist, *r.min_dist_min);
    worst_comp = std::max(worst_comp, r.max_comp_max);
    pass = pass && *r.min_dist_min > 0.20 && r.max_comp_max < 10.0;
  }
  pass = pass && slowest < 60.0;
  return {pass, fmt::format("min dist_min {:.3f} m, max comp_max {:.3f} m, slowest run {:.2f} s", worst_dist,
                            worst_comp, slowest)};
}

Outcome spc_vs_pfc() {
  int spc_violating = 0;
  int pfc_violating = 0;
  std::string per_seed;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    for (ControllerKind kind : {ControllerKind::Spc, ControllerKind::Pfc}) {
      auto cfg = reference_scenario(3, 9);
      cfg.controller.kind = kind;
      apply_family_preset(cfg, LlcFamily::B);
      cfg.seed = seed;
      const Trace t = run_scenario(cfg);
      const auto r = aggregate(t, thresholds_for(cfg), cfg.formation_time);
      const bool violated = r.dist_violations > 0;
      (kind == ControllerKind::Spc ? spc_violating : pfc_violating) += violated;
      per_seed += fmt::format(" {}{}={:.3f}", to_string(kind), seed, *r.min_dist_min);
    }
  }
  const bool pass = spc_violating == 0 && pfc_violating >= 3;
  return {pass, fmt::format("SPC violating seeds {}/5, PFC violating seeds {}/5;{}", spc_violating, pfc_violating,
                            per_seed)};
}

Outcome determinism() {
  auto cfg = reference_scenario(11, 30);
  cfg.duration = 20.0;
  cfg.seed = 7;
  std::vector<std::string> csv;
  for (int threads : {1, 3, 8}) {
    RunOptions opts;
    opts.threads = threads;
    std::ostringstream out;
    write_trace_csv(out, run_scenario(cfg, opts));
    csv.push_back(out.str());
  }
  const bool pass = csv[0] == csv[1] && csv[0] == csv[2];
  return {pass, fmt::format("threads 1/3/8, {} bytes each", csv[0].size())};
}

Outcome metrics_oracle() {
  std::mt19937_64 rng(10000);
  std::uniform_int_distribution<int> n_agents(1, 30);
  std::uniform_int_distribution<int> n_obs(0, 11);
  std::uniform_real_distribution<double> radius(0.05, 0.3);
  int mismatches = 0;
  for (int t = 0; t < 10000; ++t) {
    std::vector<Vec3> ps(n_agents(rng));
    for (auto& p : ps) p = oracle::uniform_point(rng, -5, 5);
    std::vector<Obstacle> obs(n_obs(rng));
    for (auto& o : obs) {
      const Vec3 c = oracle::uniform_point(rng, -5, 5);
      o = {{c.x, c.y}, radius(rng)};
    }
    const auto got = compute_metrics(ps, obs);
    const auto want = oracle::metrics(ps, obs);
    if (got.dist_min != want.dist_min || got.comp_max != want.comp_max || got.clear_obj != want.clear_obj) {
      ++mismatches;
    }
  }
  return {mismatches == 0, fmt::format("10000 trials, {} mismatches", mismatches)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"gradient correctness", gradient_correctness},
      {"two-drone equilibrium", two_drone_equilibrium},
      {"SPC argmin audit", argmin_audit},
      {"dynamic-N endpoints", dynamic_n_endpoints},
      {"LLC ordering", llc_ordering},
      {"stopping distance", stopping_distance},
      {"flock maintenance", flock_maintenance},
      {"SPC vs PFC robustness", spc_vs_pfc},
      {"determinism", determinism},
      {"metrics oracle", metrics_oracle},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& [name, check] = criteria[i];
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, fmt::format("threw: {}", e.what())};
    }
    failed += !o.pass;
    fmt::print("{} {:2d} {}: {}\n", o.pass ? "PASS" : "FAIL", i + 1, name, o.detail);
    std::fflush(stdout);
  }
  fmt::print("{}/{} criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
