#ifndef HOCBF_DYNAMICS_HPP
#define HOCBF_DYNAMICS_HPP

#include <Eigen/Core>
#include <string>
#include <vector>

#include "hocbf/field.hpp"

namespace hocbf {

// Componentwise control box u_min <= u <= u_max. Entries may be +/-inf.
struct ControlBounds {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  int dim() const { return static_cast<int>(lower.size()); }
  static ControlBounds box(Eigen::VectorXd lo, Eigen::VectorXd hi);
  static ControlBounds symmetric(const Eigen::VectorXd& magnitude);
  static ControlBounds unbounded(int q);
};

// Affine control system: xdot = f(x) + g(x) u, f and g built from smooth
// primitives so every Lie derivative the barrier machinery asks for exists.
struct AffineControlSystem {
  int n = 0;  // state dimension
  int q = 0;  // control dimension
  VectorField f;  // arity n, dim n
  MatrixField g;  // arity n, n x q
  ControlBounds bounds;
  std::vector<std::string> state_labels;
  std::vector<std::string> control_labels;

  // f(x) + g(x) u, evaluable on jets as well as doubles
  template <class T>
  std::vector<T> derivative(std::span<const T> x, std::span<const T> u) const {
    std::vector<T> out = f.eval<T>(x);
    std::vector<T> gm(static_cast<size_t>(n) * q);
    g.eval<T>(x, gm);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < q; ++j) out[i] += gm[i * q + j] * u[j];
    return out;
  }
  Eigen::VectorXd derivative(const Eigen::VectorXd& x,
                             const Eigen::VectorXd& u) const;
};

struct UnicycleParams {
  double mass = 1650.0;  // kg
};

// Planar unicycle with state (x, y, v, theta, phi) and controls
// (u1 = angular acceleration, u2 = driving force).
AffineControlSystem make_unicycle(const UnicycleParams& params,
                                  ControlBounds bounds);

Eigen::VectorXd clamp_to_bounds(const Eigen::VectorXd& u,
                                const ControlBounds& bounds);

// Integrator chain attached to one control component: the component
// becomes a state, driven through m_j-fold integration by a fresh input.
// Linear chains only: udot = chain_a * u + chain_g * nu.
struct AuxiliaryDynamics {
  int control_index = 0;   // which base control the chain feeds (0-based)
  Eigen::MatrixXd chain_a;  // m_j x m_j drift
  Eigen::VectorXd chain_g;  // m_j input column
  Eigen::VectorXd init;     // initial chain state; init[0] is the control value

  int length() const { return static_cast<int>(init.size()); }

  // Pure integrator chain of the given length: each level feeds the one
  // below, the new input drives the top.
  static AuxiliaryDynamics integrator_chain(int control_index, int length,
                                            double initial_value = 0.0);
};

// Base system plus integrator chains, flattened into one affine system in
// the remaining direct controls and the chain inputs. State layout:
// (x, chain_1, chain_2, ...); control layout: (direct controls, nu_1, ...).
struct AugmentedSystem {
  AffineControlSystem sys;  // combined (F, G)
  int base_n = 0;
  int base_q = 0;
  std::vector<AuxiliaryDynamics> aux;      // sorted by control_index
  std::vector<int> aux_state_offset;       // per chain, offset into augmented state
  std::vector<int> nu_column;              // per chain, column in augmented control
  std::vector<int> decision_of_base;       // per base control: column in u_y, or -1
  std::vector<int> aux_of_base;            // per base control: chain index, or -1

  int aug_n() const { return sys.n; }
  int aug_q() const { return sys.q; }
  int chain_count() const { return static_cast<int>(aux.size()); }

  Eigen::VectorXd augment_state(const Eigen::VectorXd& x) const;  // aux at init
  Eigen::VectorXd augment_state(const Eigen::VectorXd& x,
                                const Eigen::VectorXd& aux_state) const;
  Eigen::VectorXd base_state(const Eigen::VectorXd& y) const;
  Eigen::VectorXd aux_state(const Eigen::VectorXd& y) const;
  // Control actually applied to the base system at augmented state y with
  // decision vector u_y: direct components from u_y, chained ones from y.
  Eigen::VectorXd base_control(const Eigen::VectorXd& y,
                               const Eigen::VectorXd& u_y) const;
};

// Stack base dynamics with the chains. Each chain consumes one distinct
// base control; the composed G routes direct controls to the base rows and
// chain inputs to the chain rows.
AugmentedSystem compose_augmented(const AffineControlSystem& base,
                                  std::vector<AuxiliaryDynamics> aux);

}  // namespace hocbf

#endif  // HOCBF_DYNAMICS_HPP
