#include "hocbf/integrator.hpp"

#include <stdexcept>

namespace hocbf {

const char* to_string(IntegratorKind k) {
  return k == IntegratorKind::euler ? "euler" : "rk4";
}

IntegratorKind integrator_from_string(const std::string& name) {
  if (name == "euler") return IntegratorKind::euler;
  if (name == "rk4") return IntegratorKind::rk4;
  throw std::invalid_argument("unknown integrator: " + name);
}

Eigen::VectorXd step_integrate(const AffineControlSystem& sys,
                               const Eigen::VectorXd& x,
                               const Eigen::VectorXd& u, double dt,
                               IntegratorKind method) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_integrate: dt must be > 0");
  Eigen::VectorXd next;
  if (method == IntegratorKind::euler) {
    next = x + dt * sys.derivative(x, u);
  } else {
    Eigen::VectorXd k1 = sys.derivative(x, u);
    Eigen::VectorXd k2 = sys.derivative(x + 0.5 * dt * k1, u);
    Eigen::VectorXd k3 = sys.derivative(x + 0.5 * dt * k2, u);
    Eigen::VectorXd k4 = sys.derivative(x + dt * k3, u);
    next = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  if (!next.allFinite())
    throw EvalError("step_integrate: state became non-finite");
  return next;
}

}  // namespace hocbf
