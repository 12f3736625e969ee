#include "hocbf/transform.hpp"

#include <sstream>

namespace hocbf {

ScalarField control_point_barrier(const CenterTransformParams& params,
                                  int arity) {
  const double cx = params.obstacle_x;
  const double cy = params.obstacle_y;
  const double margin =
      params.obstacle_radius + params.body_radius + params.offset;
  return ScalarField(arity, [cx, cy, margin](auto x) {
    return sqrt((x[0] - cx) * (x[0] - cx) + (x[1] - cy) * (x[1] - cy)) -
           margin;
  });
}

ScalarField center_barrier(const CenterTransformParams& params, int arity) {
  const double cx = params.obstacle_x;
  const double cy = params.obstacle_y;
  const double d = params.offset;
  const double margin = params.obstacle_radius + params.body_radius;
  return ScalarField(arity, [cx, cy, d, margin](auto x) {
    auto px = x[0] + d * cos(x[3]) - cx;
    auto py = x[1] + d * sin(x[3]) - cy;
    return sqrt(px * px + py * py) - margin;
  });
}

TransformSpec make_center_transform(const CenterTransformParams& params,
                                    const AffineControlSystem& sys,
                                    std::vector<ClassKFunction> alphas,
                                    const ProbeConfig& probe) {
  if (!(params.offset > 0.0))
    throw std::invalid_argument(
        "center transform: offset must be positive (the heading term "
        "vanishes otherwise)");
  if (!(params.body_radius > 0.0) || !(params.obstacle_radius > 0.0))
    throw std::invalid_argument("center transform: radii must be positive");

  TransformSpec spec;
  spec.params = params;
  spec.original = control_point_barrier(params, sys.n);
  spec.transformed = center_barrier(params, sys.n);

  // the construction probe must see every control at one uniform order
  RelativeDegreeSet degrees =
      detect_relative_degree_set(spec.transformed, sys, probe, 5);
  if (!degrees.all_detected())
    throw SpecError("center transform: some control never appears");
  spec.degree = degrees.degree[0];
  for (int j = 0; j < sys.q; ++j)
    if (degrees.degree[static_cast<size_t>(j)] != spec.degree) {
      std::ostringstream msg;
      msg << "center transform: relative degree not uniform (control "
          << j + 1 << " at order " << degrees.degree[static_cast<size_t>(j)]
          << " vs " << spec.degree << ")";
      throw SpecError(msg.str());
    }
  if (static_cast<int>(alphas.size()) != spec.degree)
    throw std::invalid_argument(
        "center transform: need one class-K per chain level");

  HOCBFSpec inner;
  inner.barrier = spec.transformed;
  inner.degree = spec.degree;
  inner.alphas = std::move(alphas);
  inner.system = sys;
  inner.probe = probe;
  inner.name = "center_barrier";
  spec.chain = build_psi_sequence(inner);
  return spec;
}

ConstraintRow transform_row(const TransformSpec& spec,
                            const Eigen::VectorXd& x) {
  return spec.chain.constraint_row(x);
}

}  // namespace hocbf
