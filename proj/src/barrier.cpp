#include "hocbf/barrier.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace hocbf {

namespace {

ProbeConfig resolved_probe(const ProbeConfig& probe, int n) {
  ProbeConfig out = probe;
  if (out.lower.size() == 0) {
    out.lower = Eigen::VectorXd::Constant(n, -2.0);
    out.upper = Eigen::VectorXd::Constant(n, 2.0);
  }
  if (out.lower.size() != n || out.upper.size() != n)
    throw std::invalid_argument("probe box dimension mismatch");
  if (!out.lower.allFinite() || !out.upper.allFinite())
    throw std::invalid_argument("probe box must be bounded");
  if (out.count < 1) throw std::invalid_argument("probe count must be >= 1");
  return out;
}

ScalarField chain_step(const ScalarField& prev, const VectorField& f,
                       const ClassKFunction& alpha) {
  ScalarField lf = lie_along_f(prev, f);
  return ScalarField(prev.arity(), [lf, prev, alpha](auto x) {
    using T = typename std::remove_cvref_t<decltype(x)>::value_type;
    return lf.eval<T>(x) + alpha(prev.eval<T>(x));
  });
}

}  // namespace

ProbeConfig ProbeConfig::box(Eigen::VectorXd lo, Eigen::VectorXd hi, int count,
                             double tol) {
  ProbeConfig p;
  p.lower = std::move(lo);
  p.upper = std::move(hi);
  p.count = count;
  p.tol = tol;
  return p;
}

std::vector<Eigen::VectorXd> sample_box(const Eigen::VectorXd& lo,
                                        const Eigen::VectorXd& hi, int count,
                                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Eigen::VectorXd> out;
  out.reserve(static_cast<size_t>(count));
  const int n = static_cast<int>(lo.size());
  for (int s = 0; s < count; ++s) {
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x[i] = lo[i] + (hi[i] - lo[i]) * unit(rng);
    out.push_back(std::move(x));
  }
  return out;
}

PsiSequence build_psi_sequence(const HOCBFSpec& spec) {
  const AffineControlSystem& sys = spec.system;
  const int m = spec.degree;
  if (m < 1) throw std::invalid_argument("HOCBF degree must be >= 1");
  if (!spec.barrier || spec.barrier.arity() != sys.n)
    throw std::invalid_argument("barrier arity does not match system state");
  if (static_cast<int>(spec.alphas.size()) != m)
    throw std::invalid_argument("need exactly one class-K per chain level");
  for (int i = 0; i + 1 < m; ++i) {
    const int needed = m - 1 - i;  // alpha_{i+1} gets differentiated this often
    if (spec.alphas[static_cast<size_t>(i)].smoothness < needed) {
      std::ostringstream msg;
      msg << spec.name << ": class-K smoothness deficit at level " << i + 1
          << " (needs " << needed << " derivatives)";
      throw SpecError(msg.str());
    }
  }

  PsiSequence seq;
  seq.name_ = spec.name;
  seq.system_ = sys;
  seq.alphas_ = spec.alphas;
  seq.psi_.reserve(static_cast<size_t>(m));
  seq.psi_.push_back(spec.barrier);
  for (int i = 1; i < m; ++i)
    seq.psi_.push_back(
        chain_step(seq.psi_.back(), sys.f, spec.alphas[static_cast<size_t>(i - 1)]));

  // The declared degree is wrong if any control component already shows up
  // in a lower level; probe for it.
  const ProbeConfig probe = resolved_probe(spec.probe, sys.n);
  const std::vector<Eigen::VectorXd> states =
      sample_box(probe.lower, probe.upper, probe.count, probe.seed);
  for (int i = 0; i + 1 < m; ++i) {
    VectorField row = lie_along_g(seq.psi_[static_cast<size_t>(i)], sys.g);
    int evaluated = 0;
    double worst = 0.0;
    int worst_control = -1;
    for (const Eigen::VectorXd& x : states) {
      Eigen::VectorXd coeffs;
      try {
        coeffs = row(x);
      } catch (const EvalError&) {
        continue;  // probe outside the barrier's domain
      }
      ++evaluated;
      for (int j = 0; j < sys.q; ++j)
        if (std::abs(coeffs[j]) > worst) {
          worst = std::abs(coeffs[j]);
          worst_control = j;
        }
    }
    if (evaluated == 0)
      throw SpecError(spec.name +
                      ": no probe state inside the barrier's domain");
    if (worst > probe.tol) {
      std::ostringstream msg;
      msg << spec.name << ": premature control appearance (control "
          << worst_control + 1 << " at order " << i + 1 << ", magnitude "
          << worst << ")";
      throw SpecError(msg.str());
    }
  }

  seq.row_coeff_ = lie_along_g(seq.psi_.back(), sys.g);
  seq.drift_ = lie_along_f(seq.psi_.back(), sys.f);
  return seq;
}

Eigen::VectorXd PsiSequence::snapshot(std::span<const double> x) const {
  Eigen::VectorXd out(degree());
  for (int i = 0; i < degree(); ++i)
    out[i] = psi_[static_cast<size_t>(i)].eval<double>(x);
  return out;
}

Eigen::VectorXd PsiSequence::snapshot(const Eigen::VectorXd& x) const {
  return snapshot(std::span<const double>(x.data(), x.size()));
}

ConstraintRow PsiSequence::constraint_row(std::span<const double> x) const {
  const int q = system_.q;
  ConstraintRow row;
  row.tag = name_;
  row.coeff.resize(q);
  std::vector<double> coeffs(static_cast<size_t>(q));
  row_coeff_.eval<double>(x, coeffs);
  for (int j = 0; j < q; ++j) row.coeff[j] = coeffs[static_cast<size_t>(j)];
  const double top = psi_.back().eval<double>(x);
  row.rhs = drift_.eval<double>(x) + alphas_.back()(top);
  if (!row.finite())
    throw EvalError(name_ + ": non-finite constraint row");
  return row;
}

ConstraintRow PsiSequence::constraint_row(const Eigen::VectorXd& x) const {
  return constraint_row(std::span<const double>(x.data(), x.size()));
}

ConstraintRow hocbf_row(const HOCBFSpec& spec, const Eigen::VectorXd& x) {
  return build_psi_sequence(spec).constraint_row(x);
}

bool RelativeDegreeSet::all_detected() const {
  return std::all_of(degree.begin(), degree.end(),
                     [](int k) { return k > 0; });
}

int RelativeDegreeSet::max_degree() const {
  int best = 0;
  for (int k : degree) best = std::max(best, k);
  return best;
}

int RelativeDegreeSet::min_degree() const {
  int best = 0;
  for (int k : degree)
    if (k > 0 && (best == 0 || k < best)) best = k;
  return best;
}

RelativeDegreeSet detect_relative_degree_set(const ScalarField& b,
                                             const AffineControlSystem& sys,
                                             const ProbeConfig& probe_in,
                                             int cap) {
  if (cap < 1) throw std::invalid_argument("degree cap must be >= 1");
  if (cap > kMaxJetDepth)
    throw std::invalid_argument("degree cap exceeds supported jet depth");
  const ProbeConfig probe = resolved_probe(probe_in, sys.n);

  RelativeDegreeSet out;
  out.cap = cap;
  out.probe_count = probe.count;
  out.tol = probe.tol;
  out.degree.assign(static_cast<size_t>(sys.q), 0);
  out.max_magnitude = Eigen::MatrixXd::Zero(cap, sys.q);
  out.states = sample_box(probe.lower, probe.upper, probe.count, probe.seed);

  ScalarField level = b;
  for (int k = 1; k <= cap; ++k) {
    VectorField row = lie_along_g(level, sys.g);
    for (const Eigen::VectorXd& x : out.states) {
      Eigen::VectorXd coeffs;
      try {
        coeffs = row(x);
      } catch (const EvalError&) {
        continue;
      }
      for (int j = 0; j < sys.q; ++j)
        out.max_magnitude(k - 1, j) =
            std::max(out.max_magnitude(k - 1, j), std::abs(coeffs[j]));
    }
    for (int j = 0; j < sys.q; ++j)
      if (out.degree[static_cast<size_t>(j)] == 0 &&
          out.max_magnitude(k - 1, j) > probe.tol)
        out.degree[static_cast<size_t>(j)] = k;
    if (k < cap) level = lie_along_f(level, sys.f);
  }
  return out;
}

}  // namespace hocbf
