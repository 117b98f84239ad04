#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "flockspc/controller.hpp"
#include "flockspc/flock_model.hpp"
#include "flockspc/llc.hpp"
#include "flockspc/scenario.hpp"
#include "flockspc/vec3.hpp"

namespace flockspc {

// Counter-based random numbers: every draw is a pure function of its key, so
// results do not depend on evaluation order or worker count.
namespace rng {

std::uint64_t mix(std::uint64_t x);
std::uint64_t key(std::uint64_t seed, std::uint64_t domain, std::uint64_t a, std::uint64_t b, std::uint64_t c);
/// Uniform in (0, 1].
double uniform(std::uint64_t k);
/// Standard normal via Box-Muller over two derived uniforms.
double normal(std::uint64_t k);

}  // namespace rng

using AgentId = std::size_t;

struct NoiseSource {
  std::uint64_t seed = 0;
  double sigma = 0.0;
};

/// Noisy positions of `agent` itself followed by every other agent within
/// r_h of it (filter on true positions). Every observer draws its own noise:
/// the sample for (agent, j) at `tick` is keyed on (seed, tick, agent, j).
std::vector<std::pair<AgentId, Vec3>> observe(std::span<const Vec3> true_positions, AgentId agent, double r_h,
                                              const NoiseSource& noise, std::uint64_t tick);

/// Uniform spawn in the box with rejection of points closer than
/// min_spacing, or the explicit positions when given.
std::vector<Vec3> spawn_positions(const ScenarioConfig& cfg);

struct AgentRecord {
  Vec3 position;
  Vec3 velocity;
  Vec3 observed_self;
  Vec3 setpoint;
  CostBreakdown cost;
  double grad_norm = 0.0;
  std::size_t neighbor_count = 0;
};

struct TraceRecord {
  std::uint64_t tick = 0;
  double time = 0.0;
  std::optional<Vec3> target;
  std::vector<AgentRecord> agents;
};

struct Trace {
  ScenarioConfig config;
  std::vector<TraceRecord> records;
};

/// Emitted once per agent per control tick, in agent order.
struct DecisionEvent {
  std::uint64_t tick;
  double time;
  AgentId agent;
  const Observation& observation;
  const CostParams& params;
  const Setpoint& setpoint;
};

struct RunOptions {
  /// Worker threads for per-agent control evaluation; 1 = serial.
  int threads = 1;
  bool record_trace = true;
  std::function<void(const DecisionEvent&)> on_decision;
};

/// Lockstep world. Control ticks happen every steps_per_control() physics
/// steps, starting at t = 0; each agent plans from its own observation of a
/// snapshot taken at the tick time.
class World {
 public:
  explicit World(ScenarioConfig cfg, RunOptions options = {});

  /// One physics step (preceded by a control update when one is due).
  void step();
  /// Advances to the next control tick.
  void tick();

  double time() const { return static_cast<double>(step_index_) * cfg_.physics_dt; }
  long step_index() const { return step_index_; }
  const ScenarioConfig& config() const { return cfg_; }
  std::span<const PlantState> plants() const { return plants_; }
  std::span<const Setpoint> setpoints() const { return setpoints_; }
  std::vector<Vec3> true_positions() const;
  std::vector<TraceRecord>& records() { return records_; }

 private:
  void control_update();

  ScenarioConfig cfg_;
  RunOptions options_;
  std::vector<PlantState> plants_;
  std::vector<Setpoint> setpoints_;
  std::vector<TraceRecord> records_;
  // true positions at past control ticks, newest last
  std::deque<std::vector<Vec3>> history_;
  long step_index_ = 0;
  std::uint64_t tick_index_ = 0;
};

/// Full rollout of cfg.duration seconds; one TraceRecord per control tick.
Trace run_scenario(const ScenarioConfig& cfg, const RunOptions& options = {});

}  // namespace flockspc
