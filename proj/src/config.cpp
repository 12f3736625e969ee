#include "hocbf/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace hocbf {

namespace {

struct ParseState {
  ScenarioConfig cfg;
  bool u2_min_set = false;
  bool u2_max_set = false;
};

[[noreturn]] void fail(int line, const std::string& what) {
  throw ConfigError("line " + std::to_string(line) + ": " + what);
}

double parse_double(const std::string& value, int line,
                    const std::string& key) {
  try {
    size_t used = 0;
    double v = std::stod(value, &used);
    while (used < value.size() && std::isspace(static_cast<unsigned char>(
                                      value[used])))
      ++used;
    if (used != value.size()) throw std::invalid_argument("trailing text");
    return v;
  } catch (const std::exception&) {
    fail(line, "key '" + key + "' expects a number, got '" + value + "'");
  }
}

std::vector<double> parse_doubles(const std::string& value, int line,
                                  const std::string& key, size_t count) {
  std::istringstream in(value);
  std::vector<double> out;
  double v;
  while (in >> v) out.push_back(v);
  if (!in.eof() || out.size() != count)
    fail(line, "key '" + key + "' expects " + std::to_string(count) +
                   " numbers");
  return out;
}

using Setter = std::function<void(ParseState&, const std::string&, int)>;

const std::map<std::string, Setter>& schema() {
  auto num = [](const char* key, double ScenarioConfig::* field) {
    return std::pair<std::string, Setter>(
        key, [key, field](ParseState& st, const std::string& v, int line) {
          st.cfg.*field = parse_double(v, line, key);
        });
  };
  static const std::map<std::string, Setter> table = {
      num("model.mass", &ScenarioConfig::mass),
      num("model.control_offset", &ScenarioConfig::control_offset),
      num("model.body_radius", &ScenarioConfig::body_radius),
      {"obstacle.x",
       [](ParseState& st, const std::string& v, int line) {
         st.cfg.obstacle[0] = parse_double(v, line, "obstacle.x");
       }},
      {"obstacle.y",
       [](ParseState& st, const std::string& v, int line) {
         st.cfg.obstacle[1] = parse_double(v, line, "obstacle.y");
       }},
      num("obstacle.radius", &ScenarioConfig::obstacle_radius),
      {"goal.x",
       [](ParseState& st, const std::string& v, int line) {
         st.cfg.target[0] = parse_double(v, line, "goal.x");
       }},
      {"goal.y",
       [](ParseState& st, const std::string& v, int line) {
         st.cfg.target[1] = parse_double(v, line, "goal.y");
       }},
      num("goal.terminal_weight", &ScenarioConfig::terminal_weight),
      num("goal.tolerance", &ScenarioConfig::goal_tolerance),
      num("limits.v_min", &ScenarioConfig::v_min),
      num("limits.v_max", &ScenarioConfig::v_max),
      num("limits.phi_min", &ScenarioConfig::phi_min),
      num("limits.phi_max", &ScenarioConfig::phi_max),
      num("limits.u1_min", &ScenarioConfig::u1_min),
      num("limits.u1_max", &ScenarioConfig::u1_max),
      {"limits.u2_min",
       [](ParseState& st, const std::string& v, int line) {
         st.cfg.u2_min = parse_double(v, line, "limits.u2_min");
         st.u2_min_set = true;
       }},
      {"limits.u2_max",
       [](ParseState& st, const std::string& v, int line) {
         st.cfg.u2_max = parse_double(v, line, "limits.u2_max");
         st.u2_max_set = true;
       }},
      {"sim.initial_state",
       [](ParseState& st, const std::string& v, int line) {
         std::vector<double> vals =
             parse_doubles(v, line, "sim.initial_state", 5);
         st.cfg.initial_state =
             Eigen::Map<Eigen::VectorXd>(vals.data(), 5);
       }},
      num("sim.dt", &ScenarioConfig::dt),
      num("sim.t_final", &ScenarioConfig::t_final),
      {"sim.mode",
       [](ParseState& st, const std::string& v, int line) {
         try {
           st.cfg.mode = mode_from_string(v);
         } catch (const std::exception& e) {
           fail(line, e.what());
         }
       }},
      {"sim.integrator",
       [](ParseState& st, const std::string& v, int line) {
         try {
           st.cfg.integrator = integrator_from_string(v);
         } catch (const std::exception& e) {
           fail(line, e.what());
         }
       }},
      {"sim.seed",
       [](ParseState& st, const std::string& v, int line) {
         try {
           st.cfg.seed = std::stoull(v);
         } catch (const std::exception&) {
           fail(line, "key 'sim.seed' expects a nonnegative integer");
         }
       }},
      num("controller.alpha_gain", &ScenarioConfig::alpha_gain),
      num("controller.bound_alpha_gain", &ScenarioConfig::bound_alpha_gain),
      num("controller.limit_alpha_gain", &ScenarioConfig::limit_alpha_gain),
      num("controller.clf_rate", &ScenarioConfig::clf_rate),
      num("controller.slack_weight", &ScenarioConfig::slack_weight),
      num("controller.k_theta", &ScenarioConfig::k_theta),
      num("controller.k_speed", &ScenarioConfig::k_speed),
      num("controller.k_accel", &ScenarioConfig::k_accel),
      {"controller.heading_bias",
       [](ParseState& st, const std::string& v, int line) {
         st.cfg.heading_bias = parse_double(v, line, "controller.heading_bias");
       }},
      num("controller.nu_box_factor", &ScenarioConfig::nu_box_factor),
      num("controller.safety_tol", &ScenarioConfig::safety_tol),
  };
  return table;
}

void validate_parsed(const ParseState& st) {
  const ScenarioConfig& c = st.cfg;
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
  };
  require(c.mass > 0.0, "model.mass must be positive");
  require(c.control_offset > 0.0, "model.control_offset must be positive");
  require(c.body_radius > 0.0, "model.body_radius must be positive");
  require(c.obstacle_radius > 0.0, "obstacle.radius must be positive");
  require(c.dt > 0.0, "sim.dt must be positive");
  require(c.t_final > c.dt, "sim.t_final must exceed sim.dt");
  require(c.v_min <= c.v_max, "limits.v_min must not exceed limits.v_max");
  require(c.phi_min <= c.phi_max,
          "limits.phi_min must not exceed limits.phi_max");
  require(c.u1_min < c.u1_max, "limits.u1_min must be below limits.u1_max");
  require(c.u2_min < c.u2_max, "limits.u2_min must be below limits.u2_max");
  require(c.goal_tolerance > 0.0, "goal.tolerance must be positive");
  require(c.slack_weight > 0.0, "controller.slack_weight must be positive");
  require(c.alpha_gain > 0.0, "controller.alpha_gain must be positive");
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  size_t b = s.find_last_not_of(" \t\r");
  if (a == std::string::npos) return {};
  return s.substr(a, b - a + 1);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ScenarioConfig parse_scenario_config(const std::string& text) {
  ParseState st;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    size_t hash = s.find_first_of("#;");
    if (hash != std::string::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail(line, "unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      if (section.empty()) fail(line, "empty section name");
      continue;
    }
    size_t eq = s.find('=');
    if (eq == std::string::npos) fail(line, "expected 'key = value'");
    std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    if (key.empty()) fail(line, "empty key");
    if (section.empty()) fail(line, "key '" + key + "' outside any section");
    const std::string full = section + "." + key;
    auto it = schema().find(full);
    if (it == schema().end()) fail(line, "unknown key '" + full + "'");
    it->second(st, value, line);
  }
  if (!st.u2_min_set) st.cfg.u2_min = -3.0 * st.cfg.mass;
  if (!st.u2_max_set) st.cfg.u2_max = 3.0 * st.cfg.mass;
  validate_parsed(st);
  return st.cfg;
}

ScenarioConfig load_scenario_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_config(buf.str());
}

const std::map<std::string, ScenarioConfig>& scenario_registry() {
  static const std::map<std::string, ScenarioConfig> registry = [] {
    std::map<std::string, ScenarioConfig> r;
    r["paper_sec4"] = ScenarioConfig{};  // the defaults are that benchmark
    return r;
  }();
  return registry;
}

nlohmann::ordered_json config_to_json(const ScenarioConfig& c) {
  nlohmann::ordered_json j;
  j["model"] = {{"mass", c.mass},
                {"control_offset", c.control_offset},
                {"body_radius", c.body_radius}};
  j["obstacle"] = {{"x", c.obstacle[0]},
                   {"y", c.obstacle[1]},
                   {"radius", c.obstacle_radius}};
  j["goal"] = {{"x", c.target[0]},
               {"y", c.target[1]},
               {"terminal_weight", c.terminal_weight},
               {"tolerance", c.goal_tolerance}};
  j["limits"] = {{"v_min", c.v_min},     {"v_max", c.v_max},
                 {"phi_min", c.phi_min}, {"phi_max", c.phi_max},
                 {"u1_min", c.u1_min},   {"u1_max", c.u1_max},
                 {"u2_min", c.u2_min},   {"u2_max", c.u2_max}};
  j["sim"] = {{"initial_state",
               std::vector<double>(c.initial_state.data(),
                                   c.initial_state.data() +
                                       c.initial_state.size())},
              {"dt", c.dt},
              {"t_final", c.t_final},
              {"mode", to_string(c.mode)},
              {"integrator", to_string(c.integrator)},
              {"seed", c.seed}};
  j["controller"] = {{"alpha_gain", c.alpha_gain},
                     {"bound_alpha_gain", c.bound_alpha_gain},
                     {"limit_alpha_gain", c.limit_alpha_gain},
                     {"clf_rate", c.clf_rate},
                     {"slack_weight", c.slack_weight},
                     {"k_theta", c.k_theta},
                     {"k_speed", c.k_speed},
                     {"k_accel", c.k_accel},
                     {"heading_bias", c.resolved_heading_bias()},
                     {"nu_box_factor", c.nu_box_factor},
                     {"safety_tol", c.safety_tol}};
  return j;
}

nlohmann::ordered_json summary_to_json(const SafetySummary& s) {
  nlohmann::ordered_json j;
  j["safe"] = s.safe;
  j["reached_goal"] = s.reached_goal;
  j["min_center_clearance"] = s.min_center_margin;
  j["min_control_point_clearance"] = s.min_control_point_margin;
  j["min_psi"] = std::vector<double>(s.min_psi.data(),
                                     s.min_psi.data() + s.min_psi.size());
  j["final_distance"] = s.final_distance;
  j["objective_integral"] = s.objective_integral;
  j["terminal_cost"] = s.terminal_cost;
  j["objective_total"] = s.objective_total;
  j["violations"] = {{"v_low", s.v_low_violation},
                     {"v_high", s.v_high_violation},
                     {"phi_low", s.phi_low_violation},
                     {"phi_high", s.phi_high_violation},
                     {"u1", s.u1_violation},
                     {"u2", s.u2_violation}};
  j["infeasible_steps"] = s.infeasible_steps;
  j["degenerate_steps"] = s.degenerate_steps;
  j["t_end"] = s.t_end;
  j["controller_seconds_mean"] = s.controller_seconds_mean;
  return j;
}

nlohmann::ordered_json trajectory_to_json(const TrajectoryLog& log) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const StepRecord& r : log.steps) {
    rows.push_back({{"t", r.t},
                    {"x", r.state[0]},
                    {"y", r.state[1]},
                    {"v", r.state[2]},
                    {"theta", r.state[3]},
                    {"phi", r.state[4]},
                    {"u1", r.control[0]},
                    {"u2", r.control[1]},
                    {"nu", r.nu},
                    {"delta", r.delta},
                    {"b", r.barrier},
                    {"b_T", r.barrier_center},
                    {"qp_status", to_string(r.qp_status)}});
  }
  return rows;
}

void write_trajectory_csv(std::ostream& out, const TrajectoryLog& log) {
  out << "t,x,y,v,theta,phi,u1,u2,nu,delta,b,b_T,qp_status\n";
  for (const StepRecord& r : log.steps) {
    out << format_double(r.t) << ',' << format_double(r.state[0]) << ','
        << format_double(r.state[1]) << ',' << format_double(r.state[2])
        << ',' << format_double(r.state[3]) << ','
        << format_double(r.state[4]) << ',' << format_double(r.control[0])
        << ',' << format_double(r.control[1]) << ',' << format_double(r.nu)
        << ',' << format_double(r.delta) << ',' << format_double(r.barrier)
        << ',' << format_double(r.barrier_center) << ','
        << to_string(r.qp_status) << '\n';
  }
}

std::vector<TrajectoryCsvRow> read_trajectory_csv(std::istream& in) {
  std::vector<TrajectoryCsvRow> rows;
  std::string line;
  if (!std::getline(in, line))
    throw ConfigError("trajectory csv: missing header");
  if (line != "t,x,y,v,theta,phi,u1,u2,nu,delta,b,b_T,qp_status")
    throw ConfigError("trajectory csv: unexpected header");
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 13)
      throw ConfigError("trajectory csv line " + std::to_string(lineno) +
                        ": expected 13 columns");
    TrajectoryCsvRow r;
    double* fields[] = {&r.t,  &r.x,     &r.y, &r.v,   &r.theta, &r.phi,
                        &r.u1, &r.u2,    &r.nu, &r.delta, &r.b,     &r.b_t};
    for (int i = 0; i < 12; ++i) {
      const std::string& c = cells[static_cast<size_t>(i)];
      const char* begin = c.data();
      const char* end = begin + c.size();
      auto [ptr, ec] = std::from_chars(begin, end, *fields[i]);
      if (ec != std::errc() || ptr != end)
        throw ConfigError("trajectory csv line " + std::to_string(lineno) +
                          ": bad number '" + c + "'");
    }
    r.qp_status = cells[12];
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace hocbf
