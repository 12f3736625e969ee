#ifndef HOCBF_CONFIG_HPP
#define HOCBF_CONFIG_HPP

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hocbf/sim.hpp"

namespace hocbf {

// Malformed or unknown scenario configuration; the message carries the
// offending line and key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Sectioned key-value text (see docs/scenario-format.md). Strict: unknown
// sections or keys are errors, values are fully validated.
ScenarioConfig parse_scenario_config(const std::string& text);
ScenarioConfig load_scenario_config(const std::string& path);

// Built-in scenarios by name.
const std::map<std::string, ScenarioConfig>& scenario_registry();

nlohmann::ordered_json config_to_json(const ScenarioConfig& cfg);
nlohmann::ordered_json summary_to_json(const SafetySummary& summary);
nlohmann::ordered_json trajectory_to_json(const TrajectoryLog& log);

// One parsed line of an emitted trajectory table.
struct TrajectoryCsvRow {
  double t, x, y, v, theta, phi, u1, u2, nu, delta, b, b_t;
  std::string qp_status;
};

void write_trajectory_csv(std::ostream& out, const TrajectoryLog& log);
std::vector<TrajectoryCsvRow> read_trajectory_csv(std::istream& in);

}  // namespace hocbf

#endif  // HOCBF_CONFIG_HPP
