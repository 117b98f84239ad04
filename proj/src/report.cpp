#include "flockspc/report.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <set>
#include <thread>
#include <tuple>

#include <fmt/format.h>

#include "flockspc/errors.hpp"
#include "flockspc/io.hpp"
#include "flockspc/sim.hpp"

namespace flockspc {

using nlohmann::json;

namespace {

ObstacleScenario named_layout(const std::string& name, const std::string& where) {
  if (name == "none" || name == "0") return {"none", reference_obstacles(0)};
  if (name == "three" || name == "3") return {"three", reference_obstacles(3)};
  if (name == "eleven" || name == "11") return {"eleven", reference_obstacles(11)};
  throw ConfigError(where, "unknown obstacle layout \"" + name + "\" (expected none, three or eleven)");
}

template <typename T, typename Fn>
std::vector<T> read_list(const json& j, const char* key, Fn&& parse_item) {
  if (!j.contains(key)) throw ConfigError(key, "is required");
  const json& arr = j.at(key);
  if (!arr.is_array()) throw ConfigError(key, "must be an array");
  std::vector<T> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    out.push_back(parse_item(arr[i], fmt::format("{}[{}]", key, i)));
  }
  return out;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

using CellKey = std::tuple<int, int, ControllerKind, LlcFamily>;

struct Cell {
  std::vector<const RunSummary*> runs;

  std::optional<double> worst_dist() const {
    std::optional<double> w;
    for (auto* r : runs)
      if (r->min_dist_min) w = std::min(w.value_or(*r->min_dist_min), *r->min_dist_min);
    return w;
  }
  double worst_comp() const {
    double w = 0.0;
    for (auto* r : runs) w = std::max(w, r->max_comp_max);
    return w;
  }
  std::optional<double> worst_clear() const {
    std::optional<double> w;
    for (auto* r : runs)
      if (r->min_clear_obj) w = std::min(w.value_or(*r->min_clear_obj), *r->min_clear_obj);
    return w;
  }
};

std::map<CellKey, Cell> group_cells(const std::vector<RunSummary>& runs) {
  std::map<CellKey, Cell> cells;
  for (const auto& r : runs) {
    cells[{r.agent_count, r.obstacle_count, r.controller, r.llc}].runs.push_back(&r);
  }
  return cells;
}

std::string render(std::optional<double> value, bool pass) {
  if (!value) return "-";
  return fmt::format("{:.2f} {}", *value, pass ? "✓" : "✗");
}

}  // namespace

void SweepSpec::validate() const {
  if (flock_sizes.empty()) throw ConfigError("flock_sizes", "must not be empty");
  if (obstacle_scenarios.empty()) throw ConfigError("obstacle_scenarios", "must not be empty");
  if (controllers.empty()) throw ConfigError("controllers", "must not be empty");
  if (llc_families.empty()) throw ConfigError("llc_families", "must not be empty");
  if (seeds.empty()) throw ConfigError("seeds", "must not be empty");
  for (int n : flock_sizes) {
    if (n < 1) throw ConfigError("flock_sizes", "sizes must be >= 1");
  }
}

std::size_t SweepSpec::run_count() const {
  return flock_sizes.size() * obstacle_scenarios.size() * controllers.size() * llc_families.size() * seeds.size();
}

SweepSpec sweep_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("", "sweep spec must be a JSON object");
  static const std::set<std::string> known{"flock_sizes", "obstacle_scenarios", "controllers", "llc_families",
                                           "seeds",       "base",               "family_presets"};
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) throw ConfigError(key, "unknown key");
  }

  SweepSpec spec;
  spec.flock_sizes = read_list<int>(j, "flock_sizes", [](const json& v, const std::string& where) {
    if (!v.is_number_integer()) throw ConfigError(where, "must be an integer");
    return v.get<int>();
  });
  spec.obstacle_scenarios =
      read_list<ObstacleScenario>(j, "obstacle_scenarios", [](const json& v, const std::string& where) {
        if (v.is_string()) return named_layout(v.get<std::string>(), where);
        if (v.is_number_integer()) return named_layout(std::to_string(v.get<int>()), where);
        if (!v.is_object() || !v.contains("name") || !v.contains("obstacles")) {
          throw ConfigError(where, "must be a layout name or an object with name and obstacles");
        }
        // Reuse the scenario parser for the obstacle list.
        json probe{{"agent_count", 1}, {"obstacles", v.at("obstacles")}};
        try {
          return ObstacleScenario{v.at("name").get<std::string>(), scenario_from_json(probe).obstacles};
        } catch (const ConfigError& e) {
          throw ConfigError(where, e.what());
        }
      });
  spec.controllers = read_list<ControllerKind>(j, "controllers", [](const json& v, const std::string& where) {
    const auto k = v.is_string() ? parse_controller_kind(v.get<std::string>()) : std::nullopt;
    if (!k) throw ConfigError(where, "must be \"SPC\" or \"PFC\"");
    return *k;
  });
  spec.llc_families = read_list<LlcFamily>(j, "llc_families", [](const json& v, const std::string& where) {
    const auto f = v.is_string() ? parse_llc_family(v.get<std::string>()) : std::nullopt;
    if (!f) throw ConfigError(where, "must be \"A\" or \"B\"");
    return *f;
  });
  spec.seeds = read_list<std::uint64_t>(j, "seeds", [](const json& v, const std::string& where) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) throw ConfigError(where, "must be a non-negative integer");
    return v.get<std::uint64_t>();
  });
  if (j.contains("base")) {
    try {
      spec.base = scenario_from_json(j.at("base"));
    } catch (const ConfigError& e) {
      throw ConfigError("base", e.what());
    }
  }
  if (j.contains("family_presets")) {
    if (!j.at("family_presets").is_boolean()) throw ConfigError("family_presets", "must be a boolean");
    spec.family_presets = j.at("family_presets").get<bool>();
  }
  spec.validate();
  return spec;
}

std::vector<ScenarioConfig> expand_sweep(const SweepSpec& spec) {
  spec.validate();
  std::vector<ScenarioConfig> out;
  out.reserve(spec.run_count());
  for (int size : spec.flock_sizes) {
    for (const auto& layout : spec.obstacle_scenarios) {
      for (ControllerKind kind : spec.controllers) {
        for (LlcFamily family : spec.llc_families) {
          for (std::uint64_t seed : spec.seeds) {
            ScenarioConfig cfg = spec.base;
            cfg.agent_count = size;
            cfg.spawn_positions.reset();
            cfg.obstacles = layout.obstacles;
            if (spec.family_presets) {
              apply_family_preset(cfg, family);
            } else {
              cfg.llc = LlcConfig::defaults(family);
            }
            // the vertical loop is shared by both families
            cfg.llc.z_time_constant = spec.base.llc.z_time_constant;
            cfg.llc.z_accel_max = spec.base.llc.z_accel_max;
            cfg.controller.kind = kind;
            cfg.seed = seed;
            cfg.name = fmt::format("n{}_{}_{}_{}_s{}", size, layout.name, to_string(kind), to_string(family), seed);
            out.push_back(std::move(cfg));
          }
        }
      }
    }
  }
  return out;
}

std::vector<RunSummary> run_sweep(const SweepSpec& spec, int threads) {
  const auto configs = expand_sweep(spec);
  for (const auto& c : configs) c.validate();
  std::vector<RunSummary> results(configs.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      RunOptions opts;
      const Trace trace = run_scenario(configs[i], opts);
      results[i] = aggregate(trace, thresholds_for(configs[i]), configs[i].formation_time);
    }
  };

  const int n = std::clamp(threads, 1, static_cast<int>(std::max<std::size_t>(configs.size(), 1)));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
  }
  return results;
}

std::string markdown_table(const std::vector<RunSummary>& runs) {
  const auto cells = group_cells(runs);
  std::set<std::pair<int, int>> rows;  // (obstacles, size)
  std::set<std::pair<ControllerKind, LlcFamily>> groups;
  for (const auto& [key, _] : cells) {
    rows.insert({std::get<1>(key), std::get<0>(key)});
    groups.insert({std::get<2>(key), std::get<3>(key)});
  }

  std::string out;
  out += "| \\|D\\| | obstacles |";
  for (const auto& [kind, family] : groups) {
    for (const char* metric : {"dist_min", "comp_max", "clear_obj"}) {
      out += fmt::format(" {} LLC {} {} |", to_string(kind), to_string(family), metric);
    }
  }
  out += "\n|---:|---:|";
  for (std::size_t i = 0; i < groups.size() * 3; ++i) out += "---:|";
  out += "\n";

  for (const auto& [obstacles, size] : rows) {
    out += fmt::format("| {} | {} |", size, obstacles);
    for (const auto& [kind, family] : groups) {
      auto it = cells.find({size, obstacles, kind, family});
      if (it == cells.end()) {
        out += " | | |";
        continue;
      }
      const Cell& cell = it->second;
      const Thresholds& thr = cell.runs.front()->thresholds;
      const auto dist = cell.worst_dist();
      const auto clear = cell.worst_clear();
      const double comp = cell.worst_comp();
      out += " " + render(dist, dist && *dist > thr.dist_thr) + " |";
      out += " " + render(comp, comp < thr.comp_thr) + " |";
      out += " " + render(clear, clear && *clear > thr.clear_thr) + " |";
    }
    out += "\n";
  }
  return out;
}

json sweep_table_json(const std::vector<RunSummary>& runs) {
  json cells = json::array();
  for (const auto& [key, cell] : group_cells(runs)) {
    std::vector<double> dist, comp, clear;
    json seeds = json::array();
    for (auto* r : cell.runs) {
      seeds.push_back(r->seed);
      if (r->min_dist_min) dist.push_back(*r->min_dist_min);
      comp.push_back(r->max_comp_max);
      if (r->min_clear_obj) clear.push_back(*r->min_clear_obj);
    }
    auto stats = [](const std::vector<double>& v) -> json {
      if (v.empty()) return nullptr;
      return {{"min", *std::min_element(v.begin(), v.end())},
              {"median", median(v)},
              {"max", *std::max_element(v.begin(), v.end())}};
    };
    const Thresholds& thr = cell.runs.front()->thresholds;
    const auto wd = cell.worst_dist();
    const auto wc = cell.worst_clear();
    cells.push_back({
        {"agent_count", std::get<0>(key)},
        {"obstacle_count", std::get<1>(key)},
        {"controller", std::string(to_string(std::get<2>(key)))},
        {"llc", std::string(to_string(std::get<3>(key)))},
        {"seeds", seeds},
        {"dist_min", stats(dist)},
        {"comp_max", stats(comp)},
        {"clear_obj", stats(clear)},
        {"dist_pass", wd ? json(*wd > thr.dist_thr) : json(nullptr)},
        {"comp_pass", cell.worst_comp() < thr.comp_thr},
        {"clear_pass", wc ? json(*wc > thr.clear_thr) : json(nullptr)},
    });
  }
  return cells;
}

}  // namespace flockspc
