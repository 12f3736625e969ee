#include "hocbf/clf.hpp"

namespace hocbf {

namespace {

// Wrap-safe heading error toward the target, biased, evaluable at the
// target itself (the tiny offset in the second atan2 argument pins the
// error to zero there instead of leaving it undefined).
template <class T>
T heading_error(std::span<const T> x, const CLFParams& p) {
  auto dx = p.target[0] - x[0];
  auto dy = p.target[1] - x[1];
  auto cross = dy * cos(x[3]) - dx * sin(x[3]);
  auto dot = dx * cos(x[3]) + dy * sin(x[3]);
  return atan2(cross, dot + 1e-9) + p.heading_bias;
}

// Saturated range-proportional speed, faded by the heading error so the
// robot slows instead of orbiting when it is not yet pointed at the goal
// (the unicycle's turn radius otherwise exceeds the closing distance).
template <class T>
T reference_speed(std::span<const T> x, const CLFParams& p) {
  auto dx = p.target[0] - x[0];
  auto dy = p.target[1] - x[1];
  auto dist = sqrt(dx * dx + dy * dy + 1e-24);
  auto base = p.speed_cap * tanh(p.k_speed * dist / p.speed_cap);
  auto facing = 0.5 * (1.0 + cos(heading_error(x, p)));
  return base * facing * facing;
}

CLFSpec finish(CLFSpec spec, const AffineControlSystem& sys) {
  spec.control_coeff = lie_along_g(spec.lyapunov, sys);
  spec.drift = lie_along_f(spec.lyapunov, sys);
  return spec;
}

}  // namespace

CLFSpec make_unicycle_clf(const CLFParams& params,
                          const AffineControlSystem& sys) {
  CLFSpec spec;
  spec.params = params;
  spec.lyapunov = ScalarField(sys.n, [params](auto x) {
    auto speed_err = x[2] - reference_speed(x, params);
    auto turn_demand = params.k_theta * heading_error(x, params);
    auto turn_err = x[4] - turn_demand;
    return speed_err * speed_err + turn_err * turn_err;
  });
  return finish(std::move(spec), sys);
}

CLFSpec make_unicycle_clf_integral(const CLFParams& params,
                                   const AffineControlSystem& aug_sys,
                                   int drive_state_index, double mass) {
  CLFSpec spec;
  spec.params = params;
  const double inv_mass = 1.0 / mass;
  spec.lyapunov =
      ScalarField(aug_sys.n, [params, drive_state_index, inv_mass](auto x) {
        auto accel_demand =
            params.k_accel * (reference_speed(x, params) - x[2]);
        auto accel_err =
            x[static_cast<size_t>(drive_state_index)] * inv_mass -
            accel_demand;
        auto turn_demand = params.k_theta * heading_error(x, params);
        auto turn_err = x[4] - turn_demand;
        return accel_err * accel_err + turn_err * turn_err;
      });
  return finish(std::move(spec), aug_sys);
}

ClfRow clf_row(const CLFSpec& spec, const Eigen::VectorXd& x) {
  ClfRow row;
  const int q = spec.control_coeff.dim();
  std::vector<double> coeff(static_cast<size_t>(q));
  spec.control_coeff.eval<double>(std::span<const double>(x.data(), x.size()),
                                  coeff);
  row.u_coeff.resize(q);
  for (int j = 0; j < q; ++j) row.u_coeff[j] = coeff[static_cast<size_t>(j)];
  row.rhs = spec.drift(x) + spec.params.rate * spec.lyapunov(x);
  row.delta_coeff = -1.0;
  if (!row.finite()) throw EvalError("clf: non-finite row");
  return row;
}

}  // namespace hocbf
