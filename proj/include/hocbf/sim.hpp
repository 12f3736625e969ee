#ifndef HOCBF_SIM_HPP
#define HOCBF_SIM_HPP

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hocbf/integrator.hpp"
#include "hocbf/qp.hpp"

namespace hocbf {

// Which barrier formulation the controller enforces.
enum class Mode { standard, integral, transform };

const char* to_string(Mode m);
Mode mode_from_string(const std::string& name);

struct ScenarioConfig {
  // model
  double mass = 1650.0;        // kg
  double control_offset = 0.5; // control point to body center (m)
  double body_radius = 1.0;    // m

  // world
  Eigen::Vector2d obstacle{35.0, 15.0};
  double obstacle_radius = 5.0;
  Eigen::Vector2d target{65.0, 15.0};
  double terminal_weight = 1.0;  // weight on the final-distance cost term
  double goal_tolerance = 0.5;   // stop early within this distance (m)

  // limits
  double v_min = 0.0, v_max = 5.0;            // m/s
  double phi_min = -0.6981, phi_max = 0.6981; // rad/s
  double u1_min = -0.3491, u1_max = 0.3491;   // rad/s^2
  double u2_min = -4950.0, u2_max = 4950.0;   // N (three times the mass)

  // run
  Eigen::VectorXd initial_state = make_initial();  // (x, y, v, theta, phi)
  double dt = 0.1;
  double t_final = 25.0;
  Mode mode = Mode::transform;
  IntegratorKind integrator = IntegratorKind::rk4;
  std::uint64_t seed = 0;

  // controller
  double alpha_gain = 1.0;        // main barrier chain
  double bound_alpha_gain = 5.0;  // chained-control bound rows
  double limit_alpha_gain = 5.0;  // speed / turn-rate limit rows
  double clf_rate = 1.0;
  double slack_weight = 100.0;
  double k_theta = 2.0;
  double k_speed = 1.0;
  double k_accel = 1.0;
  // absent: 0 in standard mode (the paper's baseline never steers there),
  // a small positive bias in the multi-input modes
  std::optional<double> heading_bias;
  double nu_box_factor = 10.0;  // hard box on chain inputs, per unit dt
  double safety_tol = 1e-3;

  double resolved_heading_bias() const;

 private:
  static Eigen::VectorXd make_initial() {
    Eigen::VectorXd x(5);
    x << 5.0, 15.0, 0.0, 0.0, 0.0;
    return x;
  }
};

struct StepRecord {
  double t = 0.0;
  Eigen::VectorXd state;    // base state (x, y, v, theta, phi)
  Eigen::Vector2d control;  // applied (u1, u2)
  Eigen::VectorXd aux;      // chain states (integral mode)
  double nu = 0.0;
  double delta = 0.0;
  double barrier = 0.0;         // control-point barrier value
  double barrier_center = 0.0;  // center barrier value
  Eigen::VectorXd psi;          // chain snapshot of the enforced barrier
  QPStatus qp_status = QPStatus::optimal;
  std::vector<int> active_rows;
  double controller_seconds = 0.0;
};

struct TrajectoryLog {
  ScenarioConfig config;
  std::vector<StepRecord> steps;
  Eigen::VectorXd final_state;
  double t_end = 0.0;
  int infeasible_steps = 0;
  int degenerate_steps = 0;
  bool aborted = false;
  std::string abort_reason;
  double wall_seconds = 0.0;
};

struct SafetySummary {
  double min_center_margin = 0.0;         // center clearance - (r + r_b)
  double min_control_point_margin = 0.0;  // point clearance - (r + r_b + d)
  Eigen::VectorXd min_psi;                // per chain level
  double v_low_violation = 0.0;           // max excursions past the limits
  double v_high_violation = 0.0;
  double phi_low_violation = 0.0;
  double phi_high_violation = 0.0;
  double u1_violation = 0.0;
  double u2_violation = 0.0;
  double final_distance = 0.0;
  double objective_integral = 0.0;  // sum (u1^2 + u2^2) dt
  double terminal_cost = 0.0;       // weight * final distance
  double objective_total = 0.0;
  int infeasible_steps = 0;
  int degenerate_steps = 0;
  bool reached_goal = false;
  bool safe = false;  // min_center_margin >= -safety_tol
  double t_end = 0.0;
  double controller_seconds_mean = 0.0;
};

TrajectoryLog run(const ScenarioConfig& config);
SafetySummary safety_metrics(const TrajectoryLog& log,
                             const ScenarioConfig& config);

}  // namespace hocbf

#endif  // HOCBF_SIM_HPP
