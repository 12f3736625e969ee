#ifndef HOCBF_CLF_HPP
#define HOCBF_CLF_HPP

#include <Eigen/Core>

#include "hocbf/dynamics.hpp"
#include "hocbf/field.hpp"
#include "hocbf/lie.hpp"

namespace hocbf {

struct CLFParams {
  Eigen::Vector2d target{65.0, 15.0};
  double rate = 1.0;            // exponential convergence rate c
  double slack_weight = 100.0;  // penalty on the relaxation in the QP cost
  double k_theta = 2.0;         // heading-error to turn-rate gain
  double k_speed = 1.0;         // distance to reference-speed gain (1/s)
  double speed_cap = 5.0;       // reference speed saturation (m/s)
  // Deterministic reference-bearing offset (rad). A goal, an obstacle and
  // the start can sit exactly collinear, where every row's steering
  // coefficient vanishes and the minimum-norm input never turns; a small
  // bias makes that equilibrium repelling without affecting open runs.
  double heading_bias = 0.0;
  double k_accel = 1.0;  // chained-drive mode: speed error to accel demand
};

/* Goal-seeking Lyapunov surrogate for the unicycle, built so every term
 * sees a control after one differentiation: the speed tracks a saturated
 * bearing-range reference and the turn rate tracks a proportional heading
 * correction. The chained-drive variant moves the speed channel one level
 * up (the drive force is a state there) by tracking a demanded force. */
struct CLFSpec {
  CLFParams params;
  ScalarField lyapunov;  // over the evaluation state (base or augmented)
  VectorField control_coeff;  // Lg V, cached
  ScalarField drift;          // Lf V, cached
};

// The QP row in "lhs <= 0" orientation:
//   u_coeff . u + delta_coeff * delta + rhs <= 0, delta_coeff = -1.
struct ClfRow {
  Eigen::RowVectorXd u_coeff;
  double delta_coeff = -1.0;
  double rhs = 0.0;
  bool finite() const { return std::isfinite(rhs) && u_coeff.allFinite(); }
};

// Direct-drive variant over the plain unicycle.
CLFSpec make_unicycle_clf(const CLFParams& params,
                          const AffineControlSystem& sys);

// Chained-drive variant over the augmented system; drive_state_index is the
// augmented-state position of the drive force, mass converts it to an
// acceleration.
CLFSpec make_unicycle_clf_integral(const CLFParams& params,
                                   const AffineControlSystem& aug_sys,
                                   int drive_state_index, double mass);

ClfRow clf_row(const CLFSpec& spec, const Eigen::VectorXd& x);

}  // namespace hocbf

#endif  // HOCBF_CLF_HPP
