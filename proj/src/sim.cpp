#include "hocbf/sim.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "hocbf/clf.hpp"
#include "hocbf/integral.hpp"
#include "hocbf/transform.hpp"

namespace hocbf {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

ScalarField limit_field(int arity, int index, double bound, bool upper) {
  if (upper)  // bound - x[index] >= 0
    return ScalarField(arity, [index, bound](auto x) {
      return bound - x[static_cast<size_t>(index)];
    });
  return ScalarField(arity, [index, bound](auto x) {
    return x[static_cast<size_t>(index)] - bound;
  });
}

PsiSequence limit_chain(const AffineControlSystem& sys, int index,
                        double bound, bool upper, int degree, double gain,
                        const std::string& name) {
  HOCBFSpec spec;
  spec.barrier = limit_field(sys.n, index, bound, upper);
  spec.degree = degree;
  spec.alphas.assign(static_cast<size_t>(degree), ClassKFunction::linear(gain));
  spec.system = sys;
  spec.name = name;
  return build_psi_sequence(spec);
}

// Everything the per-step controller evaluates, compiled once per run.
struct Controller {
  Mode mode = Mode::standard;
  AffineControlSystem base;
  ScalarField point_field;
  ScalarField center_field;
  std::optional<PsiSequence> standard_chain;
  std::optional<TransformSpec> transform_spec;
  std::optional<IHOCBFSpec> integral_spec;
  std::vector<PsiSequence> limits;  // over the mode's evaluation state
  CLFSpec clf;
  Eigen::VectorXd lower, upper, scales;  // decision controls (no slack)
  int drive_chain = -1;  // index into integral_spec->bounds for logging
};

Controller build_controller(const ScenarioConfig& cfg) {
  Controller ctl;
  ctl.mode = cfg.mode;

  Eigen::VectorXd lo(2), hi(2);
  lo << cfg.u1_min, cfg.u2_min;
  hi << cfg.u1_max, cfg.u2_max;
  ctl.base = make_unicycle(UnicycleParams{cfg.mass},
                           ControlBounds::box(lo, hi));

  CenterTransformParams geometry{cfg.control_offset, cfg.body_radius,
                                 cfg.obstacle[0], cfg.obstacle[1],
                                 cfg.obstacle_radius};
  ctl.point_field = control_point_barrier(geometry, 5);
  ctl.center_field = center_barrier(geometry, 5);

  CLFParams clf_params;
  clf_params.target = cfg.target;
  clf_params.rate = cfg.clf_rate;
  clf_params.slack_weight = cfg.slack_weight;
  clf_params.k_theta = cfg.k_theta;
  clf_params.k_speed = cfg.k_speed;
  clf_params.speed_cap = cfg.v_max;
  clf_params.k_accel = cfg.k_accel;
  clf_params.heading_bias = cfg.resolved_heading_bias();

  const double u1_half = 0.5 * (cfg.u1_max - cfg.u1_min);
  const double u2_half = 0.5 * (cfg.u2_max - cfg.u2_min);

  if (cfg.mode == Mode::integral) {
    RelativeDegreeSet degrees =
        detect_relative_degree_set(ctl.point_field, ctl.base, ProbeConfig{}, 5);
    IHOCBFOptions opts;
    opts.bound_alpha_gain = cfg.bound_alpha_gain;
    std::vector<ClassKFunction> alphas(
        static_cast<size_t>(degrees.max_degree()),
        ClassKFunction::linear(cfg.alpha_gain));
    ctl.integral_spec =
        build_ihocbf(ctl.point_field, ctl.base, degrees, alphas, opts);
    const AffineControlSystem& aug = ctl.integral_spec->augmented.sys;

    ctl.limits.push_back(limit_chain(aug, 2, cfg.v_max, true, 2,
                                     cfg.limit_alpha_gain, "v_max"));
    ctl.limits.push_back(limit_chain(aug, 2, cfg.v_min, false, 2,
                                     cfg.limit_alpha_gain, "v_min"));
    ctl.limits.push_back(limit_chain(aug, 4, cfg.phi_max, true, 1,
                                     cfg.limit_alpha_gain, "phi_max"));
    ctl.limits.push_back(limit_chain(aug, 4, cfg.phi_min, false, 1,
                                     cfg.limit_alpha_gain, "phi_min"));

    for (int c = 0; c < ctl.integral_spec->augmented.chain_count(); ++c)
      if (ctl.integral_spec->augmented.aux[static_cast<size_t>(c)]
              .control_index == 1)
        ctl.drive_chain = c;
    if (ctl.drive_chain < 0)
      throw SpecError("integral mode: expected the drive force to be chained");
    const int drive_index =
        ctl.integral_spec->augmented
            .aux_state_offset[static_cast<size_t>(ctl.drive_chain)];
    ctl.clf =
        make_unicycle_clf_integral(clf_params, aug, drive_index, cfg.mass);

    // decision vector (u1, nu): the chained drive force is a state
    const double nu_box = cfg.nu_box_factor * (cfg.u2_max - cfg.u2_min) / cfg.dt;
    ctl.lower.resize(2);
    ctl.upper.resize(2);
    ctl.lower << cfg.u1_min, -nu_box;
    ctl.upper << cfg.u1_max, nu_box;
    ctl.scales.resize(2);
    ctl.scales << u1_half, u2_half;  // nu scaled as drive range per second
    return ctl;
  }

  if (cfg.mode == Mode::transform) {
    std::vector<ClassKFunction> alphas(2, ClassKFunction::linear(cfg.alpha_gain));
    ctl.transform_spec =
        make_center_transform(geometry, ctl.base, alphas, ProbeConfig{});
  } else {
    HOCBFSpec spec;
    spec.barrier = ctl.point_field;
    spec.degree = 2;  // the minimum relative degree: only the drive appears
    spec.alphas.assign(2, ClassKFunction::linear(cfg.alpha_gain));
    spec.system = ctl.base;
    spec.name = "obstacle";
    ctl.standard_chain = build_psi_sequence(spec);
  }

  ctl.limits.push_back(limit_chain(ctl.base, 2, cfg.v_max, true, 1,
                                   cfg.limit_alpha_gain, "v_max"));
  ctl.limits.push_back(limit_chain(ctl.base, 2, cfg.v_min, false, 1,
                                   cfg.limit_alpha_gain, "v_min"));
  ctl.limits.push_back(limit_chain(ctl.base, 4, cfg.phi_max, true, 1,
                                   cfg.limit_alpha_gain, "phi_max"));
  ctl.limits.push_back(limit_chain(ctl.base, 4, cfg.phi_min, false, 1,
                                   cfg.limit_alpha_gain, "phi_min"));
  ctl.clf = make_unicycle_clf(clf_params, ctl.base);

  ctl.lower.resize(2);
  ctl.upper.resize(2);
  ctl.lower << cfg.u1_min, cfg.u2_min;
  ctl.upper << cfg.u1_max, cfg.u2_max;
  ctl.scales.resize(2);
  ctl.scales << u1_half, u2_half;
  return ctl;
}

void validate_config(const ScenarioConfig& cfg, const Controller& ctl,
                     const Eigen::VectorXd& y0) {
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("config: dt must be > 0");
  if (!(cfg.t_final > 0.0))
    throw std::invalid_argument("config: t_final must be > 0");
  if (cfg.initial_state.size() != 5)
    throw std::invalid_argument("config: initial state needs 5 entries");
  const Eigen::VectorXd& x0 = cfg.initial_state;
  if (x0[2] < cfg.v_min - 1e-12 || x0[2] > cfg.v_max + 1e-12)
    throw std::invalid_argument("config: initial speed outside its limits");
  if (x0[4] < cfg.phi_min - 1e-12 || x0[4] > cfg.phi_max + 1e-12)
    throw std::invalid_argument("config: initial turn rate outside limits");

  // start strictly clear of the obstacle and inside every chain set
  const ScalarField& enforced =
      cfg.mode == Mode::transform ? ctl.center_field : ctl.point_field;
  if (!(enforced(x0) > 0.0))
    throw std::invalid_argument("config: initial state is not safe");
  Eigen::VectorXd snapshot;
  if (cfg.mode == Mode::integral)
    snapshot = ctl.integral_spec->main.snapshot(y0);
  else if (cfg.mode == Mode::transform)
    snapshot = ctl.transform_spec->chain.snapshot(x0);
  else
    snapshot = ctl.standard_chain->snapshot(x0);
  for (int i = 0; i < snapshot.size(); ++i)
    if (snapshot[i] < 0.0) {
      std::ostringstream msg;
      msg << "config: initial state leaves chain level " << i
          << " negative (" << snapshot[i] << ")";
      throw std::invalid_argument(msg.str());
    }
}

}  // namespace

const char* to_string(Mode m) {
  switch (m) {
    case Mode::standard:
      return "standard";
    case Mode::integral:
      return "integral";
    case Mode::transform:
      return "transform";
  }
  return "unknown";
}

Mode mode_from_string(const std::string& name) {
  if (name == "standard") return Mode::standard;
  if (name == "integral") return Mode::integral;
  if (name == "transform") return Mode::transform;
  throw std::invalid_argument("unknown mode: " + name);
}

double ScenarioConfig::resolved_heading_bias() const {
  if (heading_bias.has_value()) return *heading_bias;
  switch (mode) {
    case Mode::standard:
      return 0.0;  // the baseline never steers; keep its zero exact
    case Mode::integral:
      return 0.02;
    case Mode::transform:
      return 0.05;  // its steering coefficient grows with lateral offset
  }
  return 0.0;
}

TrajectoryLog run(const ScenarioConfig& cfg) {
  const auto wall_start = Clock::now();
  Controller ctl = build_controller(cfg);

  TrajectoryLog log;
  log.config = cfg;

  Eigen::VectorXd x = cfg.initial_state;
  Eigen::VectorXd y;  // augmented state (integral mode)
  if (cfg.mode == Mode::integral)
    y = ctl.integral_spec->augmented.augment_state(x);
  validate_config(cfg, ctl, y);

  const int steps = static_cast<int>(std::llround(cfg.t_final / cfg.dt));
  Eigen::VectorXd held = Eigen::VectorXd::Zero(2);  // fallback decision
  double t = 0.0;

  for (int step = 0; step < steps; ++step) {
    StepRecord rec;
    rec.t = t;
    rec.state = x;

    const auto ctl_start = Clock::now();
    std::vector<ConstraintRow> rows;
    ClfRow clf;
    try {
      if (cfg.mode == Mode::integral) {
        rows = ihocbf_rows(*ctl.integral_spec, y);
        for (const PsiSequence& chain : ctl.limits)
          rows.push_back(chain.constraint_row(y));
        clf = clf_row(ctl.clf, y);
      } else {
        if (cfg.mode == Mode::transform)
          rows.push_back(transform_row(*ctl.transform_spec, x));
        else
          rows.push_back(ctl.standard_chain->constraint_row(x));
        for (const PsiSequence& chain : ctl.limits)
          rows.push_back(chain.constraint_row(x));
        clf = clf_row(ctl.clf, x);
      }
    } catch (const EvalError& err) {
      log.aborted = true;
      log.abort_reason = err.what();
      break;
    }

    QPProblem problem = assemble_step_qp(rows, clf, ctl.lower, ctl.upper,
                                         cfg.slack_weight, ctl.scales);
    QPSolution sol = solve(problem);
    rec.controller_seconds = seconds_since(ctl_start);
    rec.qp_status = sol.status;
    rec.active_rows = sol.active;

    Eigen::VectorXd decision;
    if (sol.status == QPStatus::optimal) {
      decision = sol.z.head(2);
      rec.delta = sol.z[2];
      held = decision;
    } else {
      decision = held;  // declared fallback: hold the previous decision
      rec.delta = 0.0;
      if (sol.status == QPStatus::infeasible)
        ++log.infeasible_steps;
      else
        ++log.degenerate_steps;
    }

    rec.barrier = ctl.point_field(x);
    rec.barrier_center = ctl.center_field(x);

    try {
      if (cfg.mode == Mode::integral) {
        const int off = ctl.integral_spec->augmented.aux_state_offset
                            [static_cast<size_t>(ctl.drive_chain)];
        Eigen::Vector2d u_y(decision[0], decision[1]);
        u_y[0] = std::min(std::max(u_y[0], cfg.u1_min), cfg.u1_max);
        rec.control = Eigen::Vector2d(u_y[0], y[off]);
        rec.nu = u_y[1];
        rec.aux = ctl.integral_spec->augmented.aux_state(y);
        rec.psi = ctl.integral_spec->main.snapshot(y);
        y = step_integrate(ctl.integral_spec->augmented.sys, y, u_y, cfg.dt,
                           cfg.integrator);
        x = ctl.integral_spec->augmented.base_state(y);
      } else {
        Eigen::VectorXd u = clamp_to_bounds(decision, ctl.base.bounds);
        rec.control = u;
        rec.psi = cfg.mode == Mode::transform
                      ? ctl.transform_spec->chain.snapshot(x)
                      : ctl.standard_chain->snapshot(x);
        x = step_integrate(ctl.base, x, u, cfg.dt, cfg.integrator);
      }
    } catch (const EvalError& err) {
      log.steps.push_back(std::move(rec));
      log.aborted = true;
      log.abort_reason = err.what();
      break;
    }

    t += cfg.dt;
    log.steps.push_back(std::move(rec));
    if ((x.head<2>() - cfg.target).norm() <= cfg.goal_tolerance) break;
  }

  log.final_state = x;
  log.t_end = t;
  log.wall_seconds = seconds_since(wall_start);
  return log;
}

SafetySummary safety_metrics(const TrajectoryLog& log,
                             const ScenarioConfig& cfg) {
  CenterTransformParams geometry{cfg.control_offset, cfg.body_radius,
                                 cfg.obstacle[0], cfg.obstacle[1],
                                 cfg.obstacle_radius};
  ScalarField point = control_point_barrier(geometry, 5);
  ScalarField center = center_barrier(geometry, 5);

  SafetySummary out;
  out.infeasible_steps = log.infeasible_steps;
  out.degenerate_steps = log.degenerate_steps;
  out.t_end = log.t_end;

  double min_center = std::numeric_limits<double>::infinity();
  double min_point = std::numeric_limits<double>::infinity();
  double obj = 0.0;
  double ctl_time = 0.0;
  for (const StepRecord& rec : log.steps) {
    min_center = std::min(min_center, center(rec.state));
    min_point = std::min(min_point, point(rec.state));
    out.v_high_violation =
        std::max(out.v_high_violation, rec.state[2] - cfg.v_max);
    out.v_low_violation =
        std::max(out.v_low_violation, cfg.v_min - rec.state[2]);
    out.phi_high_violation =
        std::max(out.phi_high_violation, rec.state[4] - cfg.phi_max);
    out.phi_low_violation =
        std::max(out.phi_low_violation, cfg.phi_min - rec.state[4]);
    out.u1_violation = std::max({out.u1_violation,
                                 rec.control[0] - cfg.u1_max,
                                 cfg.u1_min - rec.control[0]});
    out.u2_violation = std::max({out.u2_violation,
                                 rec.control[1] - cfg.u2_max,
                                 cfg.u2_min - rec.control[1]});
    obj += (rec.control[0] * rec.control[0] +
            rec.control[1] * rec.control[1]) *
           cfg.dt;
    ctl_time += rec.controller_seconds;
    if (out.min_psi.size() == 0)
      out.min_psi = rec.psi;
    else
      out.min_psi = out.min_psi.cwiseMin(rec.psi);
  }
  if (log.final_state.size() == 5) {
    min_center = std::min(min_center, center(log.final_state));
    min_point = std::min(min_point, point(log.final_state));
  }
  out.min_center_margin = min_center;
  out.min_control_point_margin = min_point;
  out.objective_integral = obj;
  out.final_distance = log.final_state.size() == 5
                           ? (log.final_state.head<2>() - cfg.target).norm()
                           : std::numeric_limits<double>::quiet_NaN();
  out.terminal_cost = cfg.terminal_weight * out.final_distance;
  out.objective_total = out.objective_integral + out.terminal_cost;
  out.reached_goal = out.final_distance <= cfg.goal_tolerance + 1e-9;
  out.safe = out.min_center_margin >= -cfg.safety_tol;
  out.controller_seconds_mean =
      log.steps.empty() ? 0.0 : ctl_time / static_cast<double>(log.steps.size());
  return out;
}

}  // namespace hocbf
