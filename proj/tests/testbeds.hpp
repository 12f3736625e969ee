// Shared fixtures and independent oracles for the test suites. Everything
// here is deliberately written without the library's differentiation
// machinery (closed forms and finite differences only) so it can check it.
#ifndef HOCBF_TESTBEDS_HPP
#define HOCBF_TESTBEDS_HPP

#include <Eigen/Dense>
#include <cmath>

#include "hocbf/barrier.hpp"
#include "hocbf/dynamics.hpp"

namespace testbed {

// Distance-to-point barrier on the unicycle's planar position:
// b = sqrt((x-cx)^2 + (y-cy)^2) - margin, over any state whose first two
// coordinates are the position.
inline hocbf::ScalarField distance_barrier(double cx, double cy, double margin,
                                           int arity = 5) {
  return hocbf::ScalarField(arity, [cx, cy, margin](auto x) {
    return hocbf::sqrt((x[0] - cx) * (x[0] - cx) + (x[1] - cy) * (x[1] - cy)) -
           margin;
  });
}

// Hand-derived Lie derivatives of the distance barrier along the unicycle
// drift f = (v cos t, v sin t, 0, phi, 0). Notation: rho = distance,
// P = radial projection of the heading, W = tangential projection.
struct DistanceOracle {
  double cx, cy, margin, mass;

  double rho(const Eigen::VectorXd& s) const {
    return std::hypot(s[0] - cx, s[1] - cy);
  }
  double proj_radial(const Eigen::VectorXd& s) const {
    return (s[0] - cx) * std::cos(s[3]) + (s[1] - cy) * std::sin(s[3]);
  }
  double proj_tangent(const Eigen::VectorXd& s) const {
    return -(s[0] - cx) * std::sin(s[3]) + (s[1] - cy) * std::cos(s[3]);
  }

  double b(const Eigen::VectorXd& s) const { return rho(s) - margin; }
  double lf_b(const Eigen::VectorXd& s) const {
    return s[2] * proj_radial(s) / rho(s);
  }
  double lf2_b(const Eigen::VectorXd& s) const {
    const double r = rho(s), v = s[2], phi = s[4], w = proj_tangent(s);
    return v * v * w * w / (r * r * r) + v * phi * w / r;
  }
  // control coefficients of the order-2 row: (d/dphi, (1/M) d/dv) of lf_b
  Eigen::RowVector2d lg_lf_b(const Eigen::VectorXd& s) const {
    return {0.0, proj_radial(s) / (mass * rho(s))};
  }
  // order-3 coefficients, for degree-set checks
  double lg1_lf2_b(const Eigen::VectorXd& s) const {
    return s[2] * proj_tangent(s) / rho(s);
  }
  double lg2_lf2_b(const Eigen::VectorXd& s) const {
    const double r = rho(s), v = s[2], phi = s[4], w = proj_tangent(s);
    return (2.0 * v * w * w / (r * r * r) + phi * w / r) / mass;
  }
};

inline hocbf::AffineControlSystem default_unicycle(double mass = 1650.0) {
  Eigen::Vector2d mag(0.3491, 3.0 * mass);
  return hocbf::make_unicycle(hocbf::UnicycleParams{mass},
                              hocbf::ControlBounds::symmetric(mag));
}

// Double integrator x1dot = x2, x2dot = u; the workhorse for degree-2
// chain checks with hand-computable answers.
inline hocbf::AffineControlSystem double_integrator(double u_mag = 10.0) {
  hocbf::AffineControlSystem sys;
  sys.n = 2;
  sys.q = 1;
  sys.bounds = hocbf::ControlBounds::symmetric(
      Eigen::VectorXd::Constant(1, u_mag));
  sys.state_labels = {"x1", "x2"};
  sys.control_labels = {"u"};
  sys.f = hocbf::VectorField(2, 2, [](auto x, auto out) {
    using T = typename std::remove_cvref_t<decltype(x)>::value_type;
    out[0] = x[1];
    out[1] = T(0.0);
  });
  sys.g = hocbf::MatrixField(2, 2, 1, [](auto x, auto m) {
    using T = typename std::remove_cvref_t<decltype(x)>::value_type;
    (void)x;
    m.set_zero();
    m(1, 0) = T(1.0);
  });
  return sys;
}

// Single integrator xdot = u.
inline hocbf::AffineControlSystem single_integrator(double u_mag = 1.0) {
  hocbf::AffineControlSystem sys;
  sys.n = 1;
  sys.q = 1;
  sys.bounds =
      hocbf::ControlBounds::symmetric(Eigen::VectorXd::Constant(1, u_mag));
  sys.f = hocbf::VectorField(1, 1, [](auto x, auto out) {
    using T = typename std::remove_cvref_t<decltype(x)>::value_type;
    (void)x;
    out[0] = T(0.0);
  });
  sys.g = hocbf::MatrixField(1, 1, 1, [](auto x, auto m) {
    using T = typename std::remove_cvref_t<decltype(x)>::value_type;
    (void)x;
    m(0, 0) = T(1.0);
  });
  return sys;
}

// Central finite difference of a callable along a fixed direction.
template <class Fn>
double directional_fd(Fn&& fn, const Eigen::VectorXd& x,
                      const Eigen::VectorXd& dir, double step = 1e-5) {
  return (fn(x + step * dir) - fn(x - step * dir)) / (2.0 * step);
}

}  // namespace testbed

#endif  // HOCBF_TESTBEDS_HPP
