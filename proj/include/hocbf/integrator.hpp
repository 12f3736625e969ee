#ifndef HOCBF_INTEGRATOR_HPP
#define HOCBF_INTEGRATOR_HPP

#include <Eigen/Core>

#include "hocbf/dynamics.hpp"

namespace hocbf {

enum class IntegratorKind { euler, rk4 };

const char* to_string(IntegratorKind k);
IntegratorKind integrator_from_string(const std::string& name);

// One fixed step under zero-order-held control. Throws EvalError if the
// result is not finite.
Eigen::VectorXd step_integrate(const AffineControlSystem& sys,
                               const Eigen::VectorXd& x,
                               const Eigen::VectorXd& u, double dt,
                               IntegratorKind method);

}  // namespace hocbf

#endif  // HOCBF_INTEGRATOR_HPP
