#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <thread>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "flockspc/errors.hpp"
#include "flockspc/io.hpp"
#include "flockspc/metrics.hpp"
#include "flockspc/report.hpp"
#include "flockspc/sim.hpp"

namespace flockspc::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path.string());
  return out;
}

void write_json(const fs::path& path, const json& j) {
  auto out = open_output(path);
  out << j.dump(2) << '\n';
}

int sweep_threads(int requested) {
  int n = requested > 0 ? requested : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("FLOCKSPC_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || cap < 1) throw UsageError("FLOCKSPC_THREADS must be a positive integer");
    n = std::min<long>(n, cap);
  }
  return n;
}

std::string summary_csv(const RunSummary& s) {
  auto opt = [](const std::optional<double>& v) { return v ? fmt::format("{:.9g}", *v) : std::string(); };
  return fmt::format("scenario,min_dist_min,max_comp_max,min_clear_obj,pass\n{},{},{:.9g},{},{}\n", s.scenario,
                     opt(s.min_dist_min), s.max_comp_max, opt(s.min_clear_obj), s.all_pass() ? "true" : "false");
}

double mean_separation(const Trace& trace, double window) {
  const double t_end = trace.records.back().time;
  double sum = 0.0;
  int n = 0;
  for (const auto& r : trace.records) {
    if (r.time < t_end - window - 1e-9) continue;
    sum += distance(r.agents[0].position, r.agents[1].position);
    ++n;
  }
  return sum / n;
}

// -- subcommands --------------------------------------------------------------

struct SimulateArgs {
  std::string scenario;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool strict = false;
  int threads = 1;
  std::string format = "json";
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  ScenarioConfig cfg = load_scenario(a.scenario);
  if (a.seed) cfg.seed = *a.seed;
  if (!(cfg.formation_time < cfg.duration)) throw ConfigError("formation_time", "must be less than duration");

  RunOptions opts;
  opts.threads = a.threads;
  const Trace trace = run_scenario(cfg, opts);
  const RunSummary summary = aggregate(trace, thresholds_for(cfg), cfg.formation_time);

  const fs::path dir(a.out);
  {
    auto f = open_output(dir / "trace.csv");
    write_trace_csv(f, trace);
  }
  write_json(dir / "summary.json", summary_to_json(summary));

  if (a.format == "json") {
    out << summary_to_json(summary).dump(2) << '\n';
  } else if (a.format == "csv") {
    out << summary_csv(summary);
  } else {
    out << markdown_table({summary});
  }
  return a.strict && !summary.all_pass() ? kExitQuality : kExitOk;
}

struct SweepArgs {
  std::string spec;
  std::string out;
  int threads = 0;
  std::string format = "md";
};

int cmd_sweep(const SweepArgs& a, std::ostream& out) {
  const SweepSpec spec = sweep_from_json(read_json_file(a.spec));
  for (const auto& cfg : expand_sweep(spec)) {
    cfg.validate();
    if (!(cfg.formation_time < cfg.duration)) throw ConfigError("base.formation_time", "must be less than duration");
  }
  const auto runs = run_sweep(spec, sweep_threads(a.threads));

  const fs::path dir(a.out);
  for (const auto& r : runs) write_json(dir / "runs" / (r.scenario + ".json"), summary_to_json(r));
  const std::string table = markdown_table(runs);
  const json table_json = sweep_table_json(runs);
  open_output(dir / "table.md") << table;
  write_json(dir / "table.json", table_json);
  {
    auto f = open_output(dir / "summaries.csv");
    f << "scenario,min_dist_min,max_comp_max,min_clear_obj,pass\n";
    for (const auto& r : runs) {
      const std::string row = summary_csv(r);
      f << row.substr(row.find('\n') + 1);
    }
  }

  if (a.format == "md") {
    out << table;
  } else if (a.format == "json") {
    out << table_json.dump(2) << '\n';
  } else {
    out << fmt::format("{} runs written to {}\n", runs.size(), dir.string());
  }
  return kExitOk;
}

struct StepArgs {
  std::string family;
  double step = 1.0;
  std::string out;
  double duration = 10.0;
  double dt = 0.001;
};

int cmd_step_response(const StepArgs& a, std::ostream& out) {
  const auto family = parse_llc_family(a.family);
  if (!family) throw UsageError("unknown LLC family \"" + a.family + "\" (expected A or B)");
  if (!(a.duration > 0.0) || !(a.dt > 0.0)) throw UsageError("duration and dt must be positive");
  const StepResponse response = simulate_step(LlcConfig::defaults(*family), a.step, a.duration, a.dt);

  const fs::path dir(a.out);
  {
    auto f = open_output(dir / "step_response.csv");
    write_step_response_csv(f, response);
  }
  json metrics = step_metrics_to_json(response.metrics);
  metrics["family"] = std::string(to_string(*family));
  metrics["step"] = a.step;
  write_json(dir / "step_metrics.json", metrics);
  out << metrics.dump(2) << '\n';
  return kExitOk;
}

struct EquilibriumArgs {
  double w_coh = 20.0;
  double w_sep = 9.0;
  double r_drone = 0.0;
  bool verify = false;
};

int cmd_equilibrium(const EquilibriumArgs& a, std::ostream& out) {
  const double d = equilibrium_distance(a.w_coh, a.w_sep, a.r_drone);
  out << fmt::format("{:.5f}\n", d);
  if (!a.verify) return kExitOk;

  const ScenarioConfig cfg = two_agent_scenario(a.w_coh, a.w_sep, a.r_drone);
  RunOptions opts;
  const Trace trace = run_scenario(cfg, opts);
  const double measured = mean_separation(trace, 5.0);
  const double rel = std::abs(measured - d) / d;
  const bool ok = rel <= 0.05;
  out << fmt::format("rollout {:.5f} (relative error {:.2f}%) {}\n", measured, 100.0 * rel, ok ? "ok" : "FAIL");
  return ok ? kExitOk : kExitQuality;
}

struct ExportArgs {
  std::string layout = "none";
  int agents = 9;
  std::string out;
};

int cmd_export(const ExportArgs& a, std::ostream& out) {
  ScenarioConfig cfg;
  if (a.layout == "hardware") {
    cfg = hardware_preset(a.agents);
  } else if (a.layout == "none" || a.layout == "three" || a.layout == "eleven") {
    const int count = a.layout == "none" ? 0 : a.layout == "three" ? 3 : 11;
    cfg = reference_scenario(count, a.agents);
    cfg.name = a.layout + "_obstacles";
  } else {
    throw UsageError("unknown layout \"" + a.layout + "\" (expected none, three, eleven or hardware)");
  }
  const std::string text = scenario_to_json(cfg).dump(2) + "\n";
  if (a.out.empty()) {
    out << text;
  } else {
    open_output(a.out) << text;
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Flocking with spatial predictive control"};
  app.name("flockspc");
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run one scenario, write trace.csv and summary.json");
  simulate->add_option("--scenario", sim.scenario, "Scenario JSON file")->required();
  simulate->add_option("--out", sim.out, "Output directory")->required();
  simulate->add_option("--seed", sim.seed, "Override the scenario seed");
  simulate->add_flag("--strict", sim.strict, "Exit 3 when a quality threshold is violated");
  simulate->add_option("--threads", sim.threads, "Worker threads for per-agent control")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--format", sim.format, "Summary printed to stdout")
      ->check(CLI::IsMember({"json", "csv", "md"}));

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "Run a parameter grid and build the metrics table");
  sweep->add_option("--spec", sw.spec, "Sweep JSON file")->required();
  sweep->add_option("--out", sw.out, "Output directory")->required();
  sweep->add_option("--threads", sw.threads, "Concurrent runs (default: all cores, capped by FLOCKSPC_THREADS)")
      ->check(CLI::PositiveNumber);
  sweep->add_option("--format", sw.format, "Table printed to stdout")->check(CLI::IsMember({"md", "json", "csv"}));

  StepArgs st;
  auto* step = app.add_subcommand("step-response", "Single-axis step response of an LLC family");
  step->add_option("--family", st.family, "A (PID) or B (explicit)")->required();
  step->add_option("--step", st.step, "Step size in metres");
  step->add_option("--out", st.out, "Output directory")->required();
  step->add_option("--duration", st.duration, "Simulated seconds");
  step->add_option("--dt", st.dt, "Integration step");

  EquilibriumArgs eq;
  auto* equilibrium = app.add_subcommand("equilibrium", "Two-agent equilibrium distance");
  equilibrium->add_option("--w-coh", eq.w_coh, "Cohesion weight");
  equilibrium->add_option("--w-sep", eq.w_sep, "Separation weight");
  equilibrium->add_option("--r-drone", eq.r_drone, "Drone radius");
  equilibrium->add_flag("--verify", eq.verify, "Check against a two-agent rollout");

  ExportArgs ex;
  auto* exporter = app.add_subcommand("export-scenario", "Print a built-in scenario as JSON");
  exporter->add_option("--layout", ex.layout, "none, three, eleven or hardware");
  exporter->add_option("--agents", ex.agents, "Flock size")->check(CLI::PositiveNumber);
  exporter->add_option("--out", ex.out, "Output file (default: stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfig;
  }

  try {
    if (*simulate) return cmd_simulate(sim, out);
    if (*sweep) return cmd_sweep(sw, out);
    if (*step) return cmd_step_response(st, out);
    if (*equilibrium) return cmd_equilibrium(eq, out);
    if (*exporter) return cmd_export(ex, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace flockspc::cli
