// Command-line front end: run one scenario, compare controller modes on the
// same scenario, or probe a barrier's relative degree set.
#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "hocbf/config.hpp"
#include "hocbf/transform.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr const char* kOutDirEnv = "HOCBF_OUT_DIR";

// exit codes of the run subcommand
constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitUnsafe = 3;

struct CommonOptions {
  std::string scenario = "paper_sec4";
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

hocbf::ScenarioConfig load_base_config(const CommonOptions& opts) {
  hocbf::ScenarioConfig cfg;
  if (!opts.config_path.empty()) {
    cfg = hocbf::load_scenario_config(opts.config_path);
  } else {
    const auto& registry = hocbf::scenario_registry();
    auto it = registry.find(opts.scenario);
    if (it == registry.end())
      throw hocbf::ConfigError("unknown scenario '" + opts.scenario + "'");
    cfg = it->second;
  }
  if (opts.seed_set) cfg.seed = opts.seed;
  return cfg;
}

fs::path resolve_out_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
  return "out";
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << contents;
}

int run_exit_code(const hocbf::SafetySummary& summary, bool aborted) {
  if (!summary.safe || aborted) return kExitUnsafe;
  if (summary.infeasible_steps > 0 || summary.degenerate_steps > 0)
    return kExitInfeasible;
  return kExitOk;
}

int cmd_run(const CommonOptions& opts, const std::string& mode_flag,
            const std::string& format) {
  hocbf::ScenarioConfig cfg = load_base_config(opts);
  if (!mode_flag.empty()) cfg.mode = hocbf::mode_from_string(mode_flag);

  fs::path dir = resolve_out_dir(opts.out_dir);
  fs::create_directories(dir);

  hocbf::TrajectoryLog log = hocbf::run(cfg);
  hocbf::SafetySummary summary = hocbf::safety_metrics(log, cfg);

  if (format == "json") {
    write_file(dir / "trajectory.json",
               hocbf::trajectory_to_json(log).dump(2) + "\n");
  } else {
    std::ofstream out(dir / "trajectory.csv");
    hocbf::write_trajectory_csv(out, log);
  }
  ordered_json summary_json = hocbf::summary_to_json(summary);
  if (log.aborted) summary_json["aborted"] = log.abort_reason;
  write_file(dir / "summary.json", summary_json.dump(2) + "\n");
  write_file(dir / "config-echo.json",
             hocbf::config_to_json(cfg).dump(2) + "\n");

  std::cout << "mode=" << to_string(cfg.mode)
            << " steps=" << log.steps.size()
            << " final_distance=" << summary.final_distance
            << " min_center_clearance=" << summary.min_center_margin
            << " infeasible_steps=" << summary.infeasible_steps << "\n";
  return run_exit_code(summary, log.aborted);
}

int cmd_compare(const CommonOptions& opts,
                const std::vector<std::string>& mode_names) {
  if (mode_names.size() < 2)
    throw hocbf::ConfigError("compare needs at least two modes");
  hocbf::ScenarioConfig base = load_base_config(opts);

  fs::path dir = resolve_out_dir(opts.out_dir);
  fs::create_directories(dir);

  ordered_json modes_json;
  struct Entry {
    std::string name;
    int relative_degree;
    double controller_seconds;
  };
  std::vector<Entry> ranking;
  int worst_exit = kExitOk;

  for (const std::string& name : mode_names) {
    hocbf::ScenarioConfig cfg = base;
    cfg.mode = hocbf::mode_from_string(name);
    fs::path mode_dir = dir / name;
    fs::create_directories(mode_dir);

    hocbf::TrajectoryLog log = hocbf::run(cfg);
    hocbf::SafetySummary summary = hocbf::safety_metrics(log, cfg);
    {
      std::ofstream out(mode_dir / "trajectory.csv");
      hocbf::write_trajectory_csv(out, log);
    }
    write_file(mode_dir / "summary.json",
               hocbf::summary_to_json(summary).dump(2) + "\n");

    // the chain length each mode runs at for this scenario's barrier
    const int degree = cfg.mode == hocbf::Mode::integral ? 3 : 2;
    ordered_json m;
    m["metrics"] = {{"objective_total", summary.objective_total},
                    {"objective_integral", summary.objective_integral},
                    {"min_center_clearance", summary.min_center_margin},
                    {"min_control_point_clearance",
                     summary.min_control_point_margin},
                    {"final_distance", summary.final_distance},
                    {"reached_goal", summary.reached_goal},
                    {"infeasible_steps", summary.infeasible_steps},
                    {"relative_degree", degree}};
    m["timing"] = {{"wall_seconds", log.wall_seconds},
                   {"controller_seconds_mean",
                    summary.controller_seconds_mean}};
    modes_json[name] = m;
    ranking.push_back({name, degree, summary.controller_seconds_mean});
    worst_exit = std::max(worst_exit, run_exit_code(summary, log.aborted));
  }

  // lower relative degree first, then cheaper controller
  std::sort(ranking.begin(), ranking.end(), [](const Entry& a, const Entry& b) {
    if (a.relative_degree != b.relative_degree)
      return a.relative_degree < b.relative_degree;
    return a.controller_seconds < b.controller_seconds;
  });
  ordered_json out;
  out["scenario"] = opts.config_path.empty() ? opts.scenario : opts.config_path;
  out["modes"] = modes_json;
  ordered_json order = ordered_json::array();
  for (const Entry& e : ranking) order.push_back(e.name);
  out["ranking"] = {{"criteria", "relative degree, then controller time"},
                    {"order", order}};
  write_file(dir / "compare.json", out.dump(2) + "\n");
  std::cout << out["ranking"].dump() << "\n";
  return worst_exit;
}

int cmd_degree(const std::string& model, const std::string& barrier,
               double mass, double obstacle_x, double obstacle_y,
               double obstacle_r, double offset, double body_radius, int cap,
               int probes, double tol, std::uint64_t seed) {
  if (model != "unicycle")
    throw hocbf::ConfigError("unknown model '" + model + "'");
  Eigen::Vector2d mag(0.3491, 3.0 * mass);
  hocbf::AffineControlSystem sys = hocbf::make_unicycle(
      hocbf::UnicycleParams{mass}, hocbf::ControlBounds::symmetric(mag));

  hocbf::CenterTransformParams geometry{offset, body_radius, obstacle_x,
                                        obstacle_y, obstacle_r};
  hocbf::ScalarField field;
  if (barrier == "distance")
    field = hocbf::control_point_barrier(geometry, sys.n);
  else if (barrier == "center")
    field = hocbf::center_barrier(geometry, sys.n);
  else
    throw hocbf::ConfigError("unknown barrier '" + barrier +
                             "' (use distance or center)");

  hocbf::ProbeConfig probe;
  probe.count = probes;
  probe.tol = tol;
  probe.seed = seed;
  hocbf::RelativeDegreeSet degrees =
      hocbf::detect_relative_degree_set(field, sys, probe, cap);

  ordered_json j;
  ordered_json per_control;
  for (int jdx = 0; jdx < sys.q; ++jdx) {
    const int k = degrees.degree[static_cast<size_t>(jdx)];
    per_control[sys.control_labels[static_cast<size_t>(jdx)]] =
        k > 0 ? ordered_json(k) : ordered_json(nullptr);
  }
  j["degrees"] = per_control;
  j["all_detected"] = degrees.all_detected();
  j["max_degree"] = degrees.max_degree();
  j["probe_report"] = {{"probes", degrees.probe_count},
                       {"tol", degrees.tol},
                       {"cap", degrees.cap}};
  ordered_json mags = ordered_json::array();
  for (int order = 0; order < degrees.max_magnitude.rows(); ++order) {
    ordered_json row = ordered_json::array();
    for (int c = 0; c < degrees.max_magnitude.cols(); ++c)
      row.push_back(degrees.max_magnitude(order, c));
    mags.push_back(row);
  }
  j["probe_report"]["max_magnitude_per_order"] = mags;
  std::cout << j.dump(2) << "\n";
  return degrees.all_detected() ? kExitOk : kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"High-order control barrier functions for multi-input "
               "systems: closed-loop safety-filtered driving to a goal"};
  app.require_subcommand(1);

  CommonOptions opts;
  std::string mode_flag;
  std::string format = "csv";
  std::vector<std::string> compare_modes = {"standard", "integral",
                                            "transform"};

  CLI::App* run_cmd = app.add_subcommand("run", "simulate one scenario");
  run_cmd->add_option("--scenario", opts.scenario, "built-in scenario name");
  run_cmd->add_option("--config", opts.config_path, "scenario config file");
  run_cmd->add_option("--mode", mode_flag,
                      "standard | integral | transform");
  run_cmd->add_option("--out", opts.out_dir, "output directory");
  run_cmd->add_option("--format", format, "trajectory format: csv | json")
      ->check(CLI::IsMember({"csv", "json"}));
  run_cmd
      ->add_option("--seed", opts.seed, "override the scenario seed")
      ->each([&](const std::string&) { opts.seed_set = true; });

  CLI::App* compare_cmd =
      app.add_subcommand("compare", "run several modes on one scenario");
  compare_cmd->add_option("--scenario", opts.scenario);
  compare_cmd->add_option("--config", opts.config_path);
  compare_cmd->add_option("--modes", compare_modes,
                          "modes to compare (two or more)");
  compare_cmd->add_option("--out", opts.out_dir, "output directory");
  compare_cmd
      ->add_option("--seed", opts.seed, "override the scenario seed")
      ->each([&](const std::string&) { opts.seed_set = true; });

  std::string degree_model = "unicycle";
  std::string degree_barrier = "distance";
  double mass = 1650.0, obs_x = 35.0, obs_y = 15.0, obs_r = 5.0;
  double offset = 0.5, body_radius = 1.0, tol = 1e-9;
  int cap = 5, probes = 64;
  std::uint64_t probe_seed = 0x9e3779b97f4a7c15ULL;
  CLI::App* degree_cmd = app.add_subcommand(
      "degree", "probe a barrier's per-control relative degree");
  degree_cmd->add_option("--model", degree_model, "model name");
  degree_cmd->add_option("--barrier", degree_barrier, "distance | center");
  degree_cmd->add_option("--mass", mass);
  degree_cmd->add_option("--obstacle-x", obs_x);
  degree_cmd->add_option("--obstacle-y", obs_y);
  degree_cmd->add_option("--obstacle-radius", obs_r);
  degree_cmd->add_option("--offset", offset);
  degree_cmd->add_option("--body-radius", body_radius);
  degree_cmd->add_option("--cap", cap);
  degree_cmd->add_option("--probes", probes);
  degree_cmd->add_option("--tol", tol);
  degree_cmd->add_option("--probe-seed", probe_seed);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return cmd_run(opts, mode_flag, format);
    if (compare_cmd->parsed()) return cmd_compare(opts, compare_modes);
    if (degree_cmd->parsed())
      return cmd_degree(degree_model, degree_barrier, mass, obs_x, obs_y,
                        obs_r, offset, body_radius, cap, probes, tol,
                        probe_seed);
  } catch (const hocbf::ConfigError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
