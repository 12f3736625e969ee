#ifndef HOCBF_INTEGRAL_HPP
#define HOCBF_INTEGRAL_HPP

#include <Eigen/Core>
#include <vector>

#include "hocbf/barrier.hpp"
#include "hocbf/dynamics.hpp"
#include "hocbf/integrator.hpp"

namespace hocbf {

struct IHOCBFOptions {
  // class-K gain for the chain-state bound rows; faster than the main
  // barrier chain so bound enforcement does not dominate avoidance
  double bound_alpha_gain = 5.0;
  // initial value per chained control; empty picks 0 when strictly inside
  // the bound, else the bound midpoint
  std::vector<double> initial_control;
  ProbeConfig probe;  // over the augmented state
};

// The two bound barriers of one integrator chain, each an HOCBF of the
// chain's own length over the chain treated as a standalone system. Their
// rows constrain only that chain's input.
struct NuBoundChain {
  AffineControlSystem chain_sys;
  PsiSequence lower;  // barrier: control value minus its lower bound
  PsiSequence upper;  // barrier: upper bound minus the control value
  double u_min = 0.0;
  double u_max = 0.0;
  int nu_column = 0;     // column of this chain's input in u_y
  int state_offset = 0;  // offset of the chain state in the augmented state
  int length = 0;
};

/* A barrier of non-uniform relative degree rebuilt over the augmented
 * system: every control that would otherwise be differentiated becomes an
 * integrator-chain state, the barrier chain runs at the maximum degree,
 * and the chain inputs inherit the original control bounds through their
 * own CBF rows. */
struct IHOCBFSpec {
  ScalarField base_barrier;
  AugmentedSystem augmented;
  PsiSequence main;  // lifted barrier chain of degree max_degree
  std::vector<NuBoundChain> bounds;
  int max_degree = 0;
  RelativeDegreeSet degrees;

  Eigen::VectorXd initial_aux() const;
};

IHOCBFSpec build_ihocbf(const ScalarField& b, const AffineControlSystem& sys,
                        const RelativeDegreeSet& degrees,
                        std::vector<ClassKFunction> alphas,
                        const IHOCBFOptions& opts = {});

// The main row in u_y plus two bound rows per chain (in that chain's input
// only), all over the augmented control layout.
std::vector<ConstraintRow> ihocbf_rows(const IHOCBFSpec& spec,
                                       const Eigen::VectorXd& y);

// Advance all chain states one step under their inputs, with the same
// fixed-step scheme the plant uses.
Eigen::VectorXd integrate_aux(const IHOCBFSpec& spec,
                              const Eigen::VectorXd& aux_state,
                              const Eigen::VectorXd& nu, double dt,
                              IntegratorKind method = IntegratorKind::rk4);

}  // namespace hocbf

#endif  // HOCBF_INTEGRAL_HPP
