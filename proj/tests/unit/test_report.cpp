#include <algorithm>
#include <sstream>

#include "doctest.h"

#include "flockspc/errors.hpp"
#include "flockspc/io.hpp"
#include "flockspc/report.hpp"

using namespace flockspc;
using nlohmann::json;

namespace {

json small_spec() {
  json base = scenario_to_json(reference_scenario(0, 4));
  base["duration"] = 12.0;
  return json{{"flock_sizes", {4, 9}},
              {"obstacle_scenarios", {"none", "three"}},
              {"controllers", {"SPC", "PFC"}},
              {"llc_families", {"A"}},
              {"seeds", {0}},
              {"base", base}};
}

int count_lines(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("sweep expansion counts and names") {
  const auto spec = sweep_from_json(small_spec());
  CHECK(spec.run_count() == 8);
  const auto runs = expand_sweep(spec);
  REQUIRE(runs.size() == 8);
  CHECK(runs.front().name == "n4_none_SPC_A_s0");
  CHECK(runs.back().name == "n9_three_PFC_A_s0");
  CHECK(runs.back().obstacles.size() == 3);
  CHECK(runs.back().duration == 12.0);
}

TEST_CASE("family presets") {
  json j = small_spec();
  j["llc_families"] = {"B"};
  const auto runs = expand_sweep(sweep_from_json(j));
  CHECK(runs[0].llc.family == LlcFamily::B);
  CHECK(runs[0].controller.n_star == 3);
  CHECK(runs[0].controller.pfc_gain == 0.005);
}

TEST_CASE("sweep spec validation") {
  json j = small_spec();
  j["seeds"] = json::array();
  CHECK_THROWS_AS(sweep_from_json(j), ConfigError);
  j = small_spec();
  j["controllers"] = {"MPC"};
  CHECK_THROWS_AS(sweep_from_json(j), ConfigError);
  j = small_spec();
  j["obstacle_scenarios"] = {"seven"};
  CHECK_THROWS_AS(sweep_from_json(j), ConfigError);
  j = small_spec();
  j["extra"] = 1;
  CHECK_THROWS_AS(sweep_from_json(j), ConfigError);
  j = small_spec();
  j["obstacle_scenarios"] = {json{{"name", "pillar"}, {"obstacles", {{{"center", {1, 1}}, {"radius", 0.2}}}}}};
  const auto spec = sweep_from_json(j);
  CHECK(spec.obstacle_scenarios[0].name == "pillar");
  CHECK(spec.obstacle_scenarios[0].obstacles[0].radius == 0.2);
}

TEST_CASE("sweep results do not depend on the thread count") {
  const auto spec = sweep_from_json(small_spec());
  const auto a = run_sweep(spec, 1);
  const auto b = run_sweep(spec, 4);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(summary_to_json(a[i]) == summary_to_json(b[i]));
}

TEST_CASE("markdown table layout") {
  const auto runs = run_sweep(sweep_from_json(small_spec()), 2);
  const std::string md = markdown_table(runs);
  CHECK(count_lines(md) == 2 + 4);
  std::istringstream in(md);
  std::string header;
  std::getline(in, header);
  CHECK(header.find("SPC LLC A dist_min") != std::string::npos);
  CHECK(header.find("PFC LLC A clear_obj") != std::string::npos);
  CHECK(md.find("| 4 | 0 |") != std::string::npos);
  CHECK(md.find("| 9 | 3 |") != std::string::npos);
  // no obstacles: clearance renders as a dash
  std::string row;
  while (std::getline(in, row)) {
    if (row.rfind("| 4 | 0 |", 0) == 0) CHECK(row.find(" - |") != std::string::npos);
  }

  const json cells = sweep_table_json(runs);
  CHECK(cells.size() == 8);
  CHECK(cells[0].contains("dist_min"));
  CHECK(cells[0]["dist_min"].contains("median"));
}

TEST_CASE("full experiment grid has 48 cells") {
  json j{{"flock_sizes", {4, 9, 15, 30}},
         {"obstacle_scenarios", {"none", "three", "eleven"}},
         {"controllers", {"SPC", "PFC"}},
         {"llc_families", {"A", "B"}},
         {"seeds", {0}}};
  const auto spec = sweep_from_json(j);
  CHECK(spec.run_count() == 48);
}
