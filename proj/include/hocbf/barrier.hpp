#ifndef HOCBF_BARRIER_HPP
#define HOCBF_BARRIER_HPP

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hocbf/class_k.hpp"
#include "hocbf/dynamics.hpp"
#include "hocbf/field.hpp"
#include "hocbf/lie.hpp"

namespace hocbf {

// Structural violation of a barrier specification (wrong declared degree,
// insufficient class-K smoothness, failed construction probe).
class SpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One linear-in-control inequality: coeff . u + rhs >= 0.
struct ConstraintRow {
  Eigen::RowVectorXd coeff;
  double rhs = 0.0;
  std::string tag;

  bool finite() const {
    return std::isfinite(rhs) && coeff.allFinite();
  }
};

// Sampling box for structure probes. An empty box defaults to [-2, 2]^n.
struct ProbeConfig {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  int count = 64;
  double tol = 1e-9;
  std::uint64_t seed = 0x9e3779b97f4a7c15ULL;

  static ProbeConfig box(Eigen::VectorXd lo, Eigen::VectorXd hi,
                         int count = 64, double tol = 1e-9);
};

// Barrier b with its declared relative degree and class-K chain over a
// specific system.
struct HOCBFSpec {
  ScalarField barrier;
  int degree = 1;
  std::vector<ClassKFunction> alphas;
  AffineControlSystem system;
  ProbeConfig probe;
  std::string name = "barrier";
};

/* The chain psi_0 = b, psi_i = Lf psi_{i-1} + alpha_i(psi_{i-1}), with the
 * final level's control coefficients and drift precomposed so per-step row
 * evaluation does no field construction. Built by build_psi_sequence, which
 * also verifies that no control appears before the declared degree. */
class PsiSequence {
 public:
  int degree() const { return static_cast<int>(psi_.size()); }
  const ScalarField& psi(int i) const { return psi_.at(static_cast<size_t>(i)); }
  const AffineControlSystem& system() const { return system_; }
  const std::string& name() const { return name_; }

  // psi_0(x) .. psi_{m-1}(x)
  Eigen::VectorXd snapshot(std::span<const double> x) const;
  Eigen::VectorXd snapshot(const Eigen::VectorXd& x) const;

  // The degree-m constraint row at x: coeff = Lg psi_{m-1}(x),
  // rhs = Lf psi_{m-1}(x) + alpha_m(psi_{m-1}(x)).
  ConstraintRow constraint_row(std::span<const double> x) const;
  ConstraintRow constraint_row(const Eigen::VectorXd& x) const;

 private:
  friend PsiSequence build_psi_sequence(const HOCBFSpec&);
  std::vector<ScalarField> psi_;
  std::vector<ClassKFunction> alphas_;
  VectorField row_coeff_;
  ScalarField drift_;
  AffineControlSystem system_;
  std::string name_;
};

PsiSequence build_psi_sequence(const HOCBFSpec& spec);

// Convenience one-shot form; prefer a cached PsiSequence inside loops.
ConstraintRow hocbf_row(const HOCBFSpec& spec, const Eigen::VectorXd& x);

// Per-control relative degree found by probing: the smallest order at which
// the control's coefficient becomes nonzero somewhere in the sampled box.
// degree[j] == 0 means not detected within the cap.
struct RelativeDegreeSet {
  std::vector<int> degree;
  int cap = 0;
  int probe_count = 0;
  double tol = 0.0;
  Eigen::MatrixXd max_magnitude;        // cap x q, largest |coefficient| seen
  std::vector<Eigen::VectorXd> states;  // probe states used

  bool all_detected() const;
  int max_degree() const;  // over detected components
  int min_degree() const;
};

RelativeDegreeSet detect_relative_degree_set(const ScalarField& b,
                                             const AffineControlSystem& sys,
                                             const ProbeConfig& probe,
                                             int cap = 5);

// Uniform samples from a box, deterministic in the seed.
std::vector<Eigen::VectorXd> sample_box(const Eigen::VectorXd& lo,
                                        const Eigen::VectorXd& hi, int count,
                                        std::uint64_t seed);

}  // namespace hocbf

#endif  // HOCBF_BARRIER_HPP
