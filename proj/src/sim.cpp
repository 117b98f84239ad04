#include "flockspc/sim.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>

#include "flockspc/errors.hpp"

namespace flockspc {

namespace rng {

std::uint64_t mix(std::uint64_t x) {
  // splitmix64 finaliser
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t key(std::uint64_t seed, std::uint64_t domain, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  std::uint64_t h = mix(seed);
  h = mix(h ^ domain);
  h = mix(h ^ a);
  h = mix(h ^ b);
  return mix(h ^ c);
}

double uniform(std::uint64_t k) {
  return (static_cast<double>(mix(k) >> 11) + 1.0) * 0x1.0p-53;
}

double normal(std::uint64_t k) {
  const double u1 = uniform(k);
  const double u2 = uniform(k ^ 0xa5a5a5a5a5a5a5a5ULL);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace rng

namespace {

constexpr std::uint64_t kNoiseDomain = 1;
constexpr std::uint64_t kSpawnDomain = 2;
constexpr int kMaxSpawnAttempts = 100000;

struct AgentDecision {
  Observation observation;
  Setpoint setpoint;
  CostBreakdown cost;
  double grad_norm = 0.0;
};

AgentDecision decide(Observation obs, const CostParams& params, const ControllerConfig& cfg) {
  AgentDecision d;
  d.cost = evaluate_cost(obs.self, obs.neighbors, params);
  if (cfg.kind == ControllerKind::Spc) {
    auto spc = spc_decide(obs.self, obs.neighbors, params, cfg);
    d.setpoint = spc.setpoint;
    d.grad_norm = spc.gradient.total.norm();
  } else {
    const Vec3 grad = evaluate_gradient(obs.self, obs.neighbors, params).total;
    d.grad_norm = grad.norm();
    d.setpoint = d.grad_norm < kHoldGradientNorm ? Setpoint{obs.self} : Setpoint{obs.self - cfg.pfc_gain * grad};
  }
  d.observation = std::move(obs);
  return d;
}

}  // namespace

std::vector<std::pair<AgentId, Vec3>> observe(std::span<const Vec3> true_positions, AgentId agent, double r_h,
                                              const NoiseSource& noise, std::uint64_t tick) {
  auto measure = [&](AgentId j) {
    const std::uint64_t pair = (static_cast<std::uint64_t>(agent) << 32) | static_cast<std::uint64_t>(j);
    Vec3 p = true_positions[j];
    if (noise.sigma > 0.0) {
      p.x += noise.sigma * rng::normal(rng::key(noise.seed, kNoiseDomain, tick, pair, 0));
      p.y += noise.sigma * rng::normal(rng::key(noise.seed, kNoiseDomain, tick, pair, 1));
      p.z += noise.sigma * rng::normal(rng::key(noise.seed, kNoiseDomain, tick, pair, 2));
    }
    return p;
  };

  std::vector<std::pair<AgentId, Vec3>> out;
  out.emplace_back(agent, measure(agent));
  const Vec3& self = true_positions[agent];
  for (AgentId j = 0; j < true_positions.size(); ++j) {
    if (j != agent && distance(self, true_positions[j]) < r_h) {
      out.emplace_back(j, measure(j));
    }
  }
  return out;
}

std::vector<Vec3> spawn_positions(const ScenarioConfig& cfg) {
  if (cfg.spawn_positions) {
    return *cfg.spawn_positions;
  }
  const auto& box = cfg.spawn_box;
  std::vector<Vec3> out;
  out.reserve(static_cast<std::size_t>(cfg.agent_count));
  for (int i = 0; i < cfg.agent_count; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < kMaxSpawnAttempts && !placed; ++attempt) {
      auto coord = [&](int axis, double lo, double hi) {
        const auto k = rng::key(cfg.seed, kSpawnDomain, static_cast<std::uint64_t>(i),
                                static_cast<std::uint64_t>(attempt), static_cast<std::uint64_t>(axis));
        return lo + (hi - lo) * (1.0 - rng::uniform(k));
      };
      const Vec3 p{coord(0, box.min.x, box.max.x), coord(1, box.min.y, box.max.y), coord(2, box.min.z, box.max.z)};
      const bool clear = std::all_of(out.begin(), out.end(),
                                     [&](const Vec3& q) { return distance(p, q) >= box.min_spacing; });
      if (clear) {
        out.push_back(p);
        placed = true;
      }
    }
    if (!placed) {
      throw ConfigError("spawn", "cannot place " + std::to_string(cfg.agent_count) +
                                     " agents in the spawn box at the requested min_spacing");
    }
  }
  return out;
}

World::World(ScenarioConfig cfg, RunOptions options) : cfg_(std::move(cfg)), options_(std::move(options)) {
  cfg_.validate();
  const auto spawn = spawn_positions(cfg_);
  plants_.resize(spawn.size());
  setpoints_.resize(spawn.size());
  for (std::size_t i = 0; i < spawn.size(); ++i) {
    plants_[i].position = spawn[i];
    setpoints_[i].position = spawn[i];
  }
}

std::vector<Vec3> World::true_positions() const {
  std::vector<Vec3> out;
  out.reserve(plants_.size());
  for (const auto& p : plants_) out.push_back(p.position);
  return out;
}

void World::control_update() {
  const double now = time();
  history_.push_back(true_positions());
  while (history_.size() > static_cast<std::size_t>(cfg_.observation_delay) + 1) {
    history_.pop_front();
  }
  const std::vector<Vec3>& seen = history_.front();
  const std::uint64_t delay = history_.size() - 1;
  const std::uint64_t measured_tick = tick_index_ - delay;

  CostParams params = cfg_.cost;
  params.target = active_target(cfg_.waypoints, now);
  params.obstacles = cfg_.obstacles;

  const NoiseSource noise{cfg_.seed, cfg_.noise_sigma};
  const std::size_t n = plants_.size();
  std::vector<AgentDecision> decisions(n);

  auto plan_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      Observation obs;
      for (auto& [id, pos] : observe(seen, i, cfg_.r_h, noise, measured_tick)) {
        if (id == i) {
          obs.self = pos;
        } else {
          obs.neighbors.push_back(pos);
        }
      }
      decisions[i] = decide(std::move(obs), params, cfg_.controller);
    }
  };

  const std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(options_.threads, 1)), 1, n);
  if (workers == 1) {
    plan_range(0, n);
  } else {
    std::vector<std::future<void>> jobs;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t begin = 0; begin < n; begin += chunk) {
      jobs.push_back(std::async(std::launch::async, plan_range, begin, std::min(n, begin + chunk)));
    }
    for (auto& j : jobs) j.get();
  }

  TraceRecord record;
  if (options_.record_trace) {
    record.tick = tick_index_;
    record.time = now;
    record.target = params.target;
    record.agents.reserve(n);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto& d = decisions[i];
    setpoints_[i] = d.setpoint;
    if (options_.on_decision) {
      options_.on_decision(DecisionEvent{tick_index_, now, i, d.observation, params, d.setpoint});
    }
    if (options_.record_trace) {
      record.agents.push_back(AgentRecord{plants_[i].position, plants_[i].velocity, d.observation.self,
                                          d.setpoint.position, d.cost, d.grad_norm,
                                          d.observation.neighbors.size()});
    }
  }
  if (options_.record_trace) {
    records_.push_back(std::move(record));
  }
  ++tick_index_;
}

void World::step() {
  if (step_index_ % cfg_.steps_per_control() == 0) {
    control_update();
  }
  for (std::size_t i = 0; i < plants_.size(); ++i) {
    plants_[i] = step_agent(plants_[i], setpoints_[i].position, cfg_.llc, cfg_.physics_dt);
  }
  ++step_index_;
}

void World::tick() {
  do {
    step();
  } while (step_index_ % cfg_.steps_per_control() != 0);
}

Trace run_scenario(const ScenarioConfig& cfg, const RunOptions& options) {
  World world(cfg, options);
  const long steps = world.config().total_steps();
  while (world.step_index() < steps) {
    world.step();
  }
  return Trace{world.config(), std::move(world.records())};
}

}  // namespace flockspc
