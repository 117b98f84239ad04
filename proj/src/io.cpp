#include "flockspc/io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>
#include <string>

#include <fmt/format.h>

#include "flockspc/errors.hpp"

namespace flockspc {

using nlohmann::json;

namespace {

/// Walks one JSON object, remembering which keys were consumed so that
/// leftovers can be reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "must be an object");
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* get(const std::string& key) {
    known_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  void read(const std::string& key, double& out) {
    if (const json* v = get(key)) out = as_number(*v, field(key));
  }

  void read(const std::string& key, int& out) {
    if (const json* v = get(key)) {
      if (!v->is_number_integer()) throw ConfigError(field(key), "must be an integer");
      out = v->get<int>();
    }
  }

  void read(const std::string& key, std::uint64_t& out) {
    if (const json* v = get(key)) {
      if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<std::int64_t>() >= 0)) throw ConfigError(field(key), "must be a non-negative integer");
      out = v->get<std::uint64_t>();
    }
  }

  void read(const std::string& key, bool& out) {
    if (const json* v = get(key)) {
      if (!v->is_boolean()) throw ConfigError(field(key), "must be a boolean");
      out = v->get<bool>();
    }
  }

  void read(const std::string& key, std::string& out) {
    if (const json* v = get(key)) {
      if (!v->is_string()) throw ConfigError(field(key), "must be a string");
      out = v->get<std::string>();
    }
  }

  void read(const std::string& key, Vec3& out) {
    if (const json* v = get(key)) out = as_vec3(*v, field(key));
  }

  void finish() const {
    for (const auto& [key, _] : j_.items()) {
      if (!known_.contains(key)) throw ConfigError(field(key), "unknown key");
    }
  }

  static double as_number(const json& v, const std::string& where) {
    if (!v.is_number()) throw ConfigError(where, "must be a number");
    return v.get<double>();
  }

  static Vec3 as_vec3(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 3) throw ConfigError(where, "must be an array of 3 numbers");
    return {as_number(v[0], where + "[0]"), as_number(v[1], where + "[1]"), as_number(v[2], where + "[2]")};
  }

  static Vec2 as_vec2(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 2) throw ConfigError(where, "must be an array of 2 numbers");
    return {as_number(v[0], where + "[0]"), as_number(v[1], where + "[1]")};
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> known_;
};

const json& require_array(const json& v, const std::string& where) {
  if (!v.is_array()) throw ConfigError(where, "must be an array");
  return v;
}

json vec_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

void read_cost(const json& j, CostParams& cost) {
  ObjectReader r(j, "cost");
  r.read("w_coh", cost.w_coh);
  r.read("w_sep", cost.w_sep);
  r.read("w_tar", cost.w_tar);
  r.read("w_obs", cost.w_obs);
  r.read("r_drone", cost.r_drone);
  r.read("zero_hat", cost.zero_hat);
  r.finish();
}

void read_controller(const json& j, ControllerConfig& c) {
  ObjectReader r(j, "controller");
  std::string kind{to_string(c.kind)};
  r.read("kind", kind);
  const auto parsed = parse_controller_kind(kind);
  if (!parsed) throw ConfigError("controller.kind", "must be \"SPC\" or \"PFC\"");
  c.kind = *parsed;
  r.read("epsilon", c.epsilon);
  r.read("n_star", c.n_star);
  r.read("pfc_gain", c.pfc_gain);
  r.read("dynamic_n", c.dynamic_n);
  r.finish();
}

void read_llc(const json& j, LlcConfig& llc) {
  ObjectReader r(j, "llc");
  std::string family{to_string(llc.family)};
  r.read("family", family);
  const auto parsed = parse_llc_family(family);
  if (!parsed) throw ConfigError("llc.family", "must be \"A\" or \"B\"");
  if (*parsed != llc.family) llc = LlcConfig::defaults(*parsed);
  r.read("k_v", llc.k_v);
  r.read("k_p", llc.k_p);
  r.read("k_i", llc.k_i);
  r.read("tilt_min", llc.tilt_min);
  r.read("tilt_max", llc.tilt_max);
  r.read("t_delta", llc.t_delta);
  r.read("z_time_constant", llc.z_time_constant);
  r.read("z_accel_max", llc.z_accel_max);
  r.finish();
}

void read_spawn(const json& j, ScenarioConfig& cfg) {
  ObjectReader r(j, "spawn");
  if (const json* positions = r.get("positions")) {
    std::vector<Vec3> out;
    const auto& arr = require_array(*positions, "spawn.positions");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      out.push_back(ObjectReader::as_vec3(arr[i], fmt::format("spawn.positions[{}]", i)));
    }
    cfg.spawn_positions = std::move(out);
  }
  r.read("box_min", cfg.spawn_box.min);
  r.read("box_max", cfg.spawn_box.max);
  r.read("min_spacing", cfg.spawn_box.min_spacing);
  r.finish();
}

}  // namespace

ScenarioConfig scenario_from_json(const json& j) {
  ScenarioConfig cfg;
  ObjectReader r(j, "");
  if (!r.has("agent_count")) throw ConfigError("agent_count", "is required");

  r.read("name", cfg.name);
  r.read("agent_count", cfg.agent_count);
  if (const json* v = r.get("spawn")) read_spawn(*v, cfg);

  if (const json* v = r.get("obstacles")) {
    const auto& arr = require_array(*v, "obstacles");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      ObjectReader o(arr[i], fmt::format("obstacles[{}]", i));
      Obstacle obs;
      if (const json* c = o.get("center")) {
        obs.center = ObjectReader::as_vec2(*c, o.field("center"));
      } else {
        throw ConfigError(o.field("center"), "is required");
      }
      o.read("radius", obs.radius);
      o.finish();
      cfg.obstacles.push_back(obs);
    }
  }

  if (const json* v = r.get("waypoints")) {
    const auto& arr = require_array(*v, "waypoints");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      ObjectReader w(arr[i], fmt::format("waypoints[{}]", i));
      Waypoint wp;
      if (!w.has("time") || !w.has("target")) throw ConfigError(w.field("target"), "time and target are required");
      w.read("time", wp.time);
      w.read("target", wp.target);
      w.finish();
      cfg.waypoints.push_back(wp);
    }
  }

  if (const json* v = r.get("cost")) read_cost(*v, cfg.cost);
  if (const json* v = r.get("controller")) read_controller(*v, cfg.controller);
  if (const json* v = r.get("llc")) read_llc(*v, cfg.llc);

  if (const json* v = r.get("r_h")) {
    if (v->is_null() || (v->is_string() && v->get<std::string>() == "inf")) {
      cfg.r_h = std::numeric_limits<double>::infinity();
    } else {
      cfg.r_h = ObjectReader::as_number(*v, "r_h");
    }
  }
  r.read("noise_sigma", cfg.noise_sigma);
  r.read("physics_dt", cfg.physics_dt);
  r.read("control_period", cfg.control_period);
  r.read("duration", cfg.duration);
  r.read("seed", cfg.seed);
  r.read("observation_delay", cfg.observation_delay);
  r.read("formation_time", cfg.formation_time);
  r.read("r_safety", cfg.r_safety);
  r.read("comp_thr", cfg.comp_thr);
  r.finish();

  cfg.validate();
  return cfg;
}

json scenario_to_json(const ScenarioConfig& cfg) {
  json j;
  j["name"] = cfg.name;
  j["agent_count"] = cfg.agent_count;
  if (cfg.spawn_positions) {
    json arr = json::array();
    for (const auto& p : *cfg.spawn_positions) arr.push_back(vec_json(p));
    j["spawn"] = {{"positions", arr}};
  } else {
    j["spawn"] = {{"box_min", vec_json(cfg.spawn_box.min)},
                  {"box_max", vec_json(cfg.spawn_box.max)},
                  {"min_spacing", cfg.spawn_box.min_spacing}};
  }
  j["obstacles"] = json::array();
  for (const auto& o : cfg.obstacles) {
    j["obstacles"].push_back({{"center", {o.center.x, o.center.y}}, {"radius", o.radius}});
  }
  j["waypoints"] = json::array();
  for (const auto& w : cfg.waypoints) {
    j["waypoints"].push_back({{"time", w.time}, {"target", vec_json(w.target)}});
  }
  const auto& c = cfg.cost;
  j["cost"] = {{"w_coh", c.w_coh}, {"w_sep", c.w_sep},     {"w_tar", c.w_tar},
               {"w_obs", c.w_obs}, {"r_drone", c.r_drone}, {"zero_hat", c.zero_hat}};
  const auto& k = cfg.controller;
  j["controller"] = {{"kind", std::string(to_string(k.kind))},
                     {"epsilon", k.epsilon},
                     {"n_star", k.n_star},
                     {"pfc_gain", k.pfc_gain},
                     {"dynamic_n", k.dynamic_n}};
  const auto& l = cfg.llc;
  j["llc"] = {{"family", std::string(to_string(l.family))},
              {"k_v", l.k_v},
              {"k_p", l.k_p},
              {"k_i", l.k_i},
              {"tilt_min", l.tilt_min},
              {"tilt_max", l.tilt_max},
              {"t_delta", l.t_delta},
              {"z_time_constant", l.z_time_constant},
              {"z_accel_max", l.z_accel_max}};
  if (std::isinf(cfg.r_h)) {
    j["r_h"] = "inf";
  } else {
    j["r_h"] = cfg.r_h;
  }
  j["noise_sigma"] = cfg.noise_sigma;
  j["physics_dt"] = cfg.physics_dt;
  j["control_period"] = cfg.control_period;
  j["duration"] = cfg.duration;
  j["seed"] = cfg.seed;
  j["observation_delay"] = cfg.observation_delay;
  j["formation_time"] = cfg.formation_time;
  j["r_safety"] = cfg.r_safety;
  j["comp_thr"] = cfg.comp_thr;
  return j;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", path.string() + ": malformed JSON: " + e.what());
  }
}

ScenarioConfig load_scenario(const std::filesystem::path& path) { return scenario_from_json(read_json_file(path)); }

void write_trace_csv(std::ostream& out, const Trace& trace) {
  out << "time_s,agent,px,py,pz,vx,vy,vz,ox,oy,oz,spx,spy,spz,"
         "cost_total,cost_coh,cost_sep,cost_tar,cost_obs,grad_norm\n";
  fmt::memory_buffer buf;
  for (const auto& rec : trace.records) {
    for (std::size_t i = 0; i < rec.agents.size(); ++i) {
      const auto& a = rec.agents[i];
      buf.clear();
      fmt::format_to(std::back_inserter(buf),
                     "{:.6f},{},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},"
                     "{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g}\n",
                     rec.time, i, a.position.x, a.position.y, a.position.z, a.velocity.x, a.velocity.y,
                     a.velocity.z, a.observed_self.x, a.observed_self.y, a.observed_self.z, a.setpoint.x,
                     a.setpoint.y, a.setpoint.z, a.cost.total, a.cost.coh, a.cost.sep, a.cost.tar, a.cost.obs,
                     a.grad_norm);
      out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    }
  }
}

json summary_to_json(const RunSummary& s) {
  auto opt = [](const auto& v) -> json { return v ? json(*v) : json(nullptr); };
  return json{
      {"scenario", s.scenario},
      {"agent_count", s.agent_count},
      {"obstacle_count", s.obstacle_count},
      {"controller", std::string(to_string(s.controller))},
      {"llc", std::string(to_string(s.llc))},
      {"seed", s.seed},
      {"formation_time", s.formation_time},
      {"samples", s.samples},
      {"thresholds",
       {{"dist_thr", s.thresholds.dist_thr}, {"comp_thr", s.thresholds.comp_thr}, {"clear_thr", s.thresholds.clear_thr}}},
      {"min_dist_min", opt(s.min_dist_min)},
      {"max_comp_max", s.max_comp_max},
      {"min_clear_obj", opt(s.min_clear_obj)},
      {"dist_pass", opt(s.dist_pass)},
      {"comp_pass", s.comp_pass},
      {"clear_pass", opt(s.clear_pass)},
      {"violations",
       {{"dist", s.dist_violations}, {"comp", s.comp_violations}, {"clear", s.clear_violations}}},
      {"pass", s.all_pass()},
  };
}

void write_step_response_csv(std::ostream& out, const StepResponse& response) {
  out << "time_s,position,velocity,tilt\n";
  for (const auto& s : response.samples) {
    out << fmt::format("{:.6f},{:.9g},{:.9g},{:.9g}\n", s.time, s.position, s.velocity, s.tilt);
  }
}

json step_metrics_to_json(const StepResponseMetrics& m) {
  return json{{"rise_time_90", m.rise_time_90},
              {"overshoot_pct", m.overshoot_pct},
              {"settling_time_2pct", m.settling_time_2pct},
              {"settled", m.settled}};
}

}  // namespace flockspc
