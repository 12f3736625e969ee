#ifndef HOCBF_TRANSFORM_HPP
#define HOCBF_TRANSFORM_HPP

#include <Eigen/Core>

#include "hocbf/barrier.hpp"
#include "hocbf/dynamics.hpp"

namespace hocbf {

// Geometry of the control-point to body-center mapping for a circular
// body avoiding a circular obstacle.
struct CenterTransformParams {
  double offset = 0.5;       // control point to center distance (m)
  double body_radius = 1.0;  // circumscribing radius of the body (m)
  double obstacle_x = 35.0;
  double obstacle_y = 15.0;
  double obstacle_radius = 5.0;
};

/* Avoidance rewritten on the body center instead of the control point:
 * the centered barrier picks up heading dependence through the offset, so
 * both controls reach it at the same (lower) order and one row constrains
 * the full control vector. Keeping the center clear of the obstacle by
 * the body radius is the exact collision-freedom condition for a circular
 * body; the control-point condition is reported alongside as a metric. */
struct TransformSpec {
  ScalarField original;     // control-point barrier, margin r + r_b + d
  ScalarField transformed;  // center barrier, margin r + r_b
  int degree = 0;           // uniform relative degree of the center barrier
  CenterTransformParams params;
  PsiSequence chain;        // compiled over the supplied system

  double center_margin() const {
    return params.obstacle_radius + params.body_radius;
  }
  double control_point_margin() const {
    return center_margin() + params.offset;
  }
};

// Barriers only; usable without a system (logging, metrics).
ScalarField control_point_barrier(const CenterTransformParams& params,
                                  int arity = 5);
ScalarField center_barrier(const CenterTransformParams& params,
                           int arity = 5);

TransformSpec make_center_transform(
    const CenterTransformParams& params, const AffineControlSystem& sys,
    std::vector<ClassKFunction> alphas = {ClassKFunction::linear(1.0),
                                          ClassKFunction::linear(1.0)},
    const ProbeConfig& probe = {});

ConstraintRow transform_row(const TransformSpec& spec,
                            const Eigen::VectorXd& x);

}  // namespace hocbf

#endif  // HOCBF_TRANSFORM_HPP
