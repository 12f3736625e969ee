#include "hocbf/integral.hpp"

#include <cmath>
#include <sstream>

namespace hocbf {

namespace {

ScalarField lift_to_augmented(const ScalarField& b, int aug_n) {
  const int base_n = b.arity();
  return ScalarField(aug_n, [b, base_n](auto y) {
    using T = typename std::remove_cvref_t<decltype(y)>::value_type;
    return b.eval<T>(y.first(static_cast<size_t>(base_n)));
  });
}

AffineControlSystem standalone_chain(const AuxiliaryDynamics& aux) {
  const int m = aux.length();
  Eigen::MatrixXd a = aux.chain_a;
  Eigen::VectorXd g = aux.chain_g;
  AffineControlSystem sys;
  sys.n = m;
  sys.q = 1;
  sys.bounds = ControlBounds::unbounded(1);
  sys.f = VectorField(m, m, [a, m](auto s, auto out) {
    using T = typename std::remove_cvref_t<decltype(s)>::value_type;
    for (int r = 0; r < m; ++r) {
      T acc(0.0);
      for (int c = 0; c < m; ++c) acc += a(r, c) * s[static_cast<size_t>(c)];
      out[static_cast<size_t>(r)] = acc;
    }
  });
  sys.g = MatrixField(m, m, 1, [g, m](auto s, auto view) {
    using T = typename std::remove_cvref_t<decltype(s)>::value_type;
    (void)s;
    for (int r = 0; r < m; ++r) view(r, 0) = T(g[r]);
  });
  return sys;
}

}  // namespace

Eigen::VectorXd IHOCBFSpec::initial_aux() const {
  Eigen::VectorXd out(augmented.aug_n() - augmented.base_n);
  int at = 0;
  for (const AuxiliaryDynamics& aux : augmented.aux) {
    out.segment(at, aux.length()) = aux.init;
    at += aux.length();
  }
  return out;
}

IHOCBFSpec build_ihocbf(const ScalarField& b, const AffineControlSystem& sys,
                        const RelativeDegreeSet& degrees,
                        std::vector<ClassKFunction> alphas,
                        const IHOCBFOptions& opts) {
  if (static_cast<int>(degrees.degree.size()) != sys.q)
    throw std::invalid_argument("ihocbf: degree set does not match system");
  if (!degrees.all_detected())
    throw SpecError("ihocbf: some control has no detected relative degree");
  const int top = degrees.max_degree();
  if (static_cast<int>(alphas.size()) != top)
    throw std::invalid_argument(
        "ihocbf: need one class-K per level of the maximum degree");

  // one integrator chain per control that appears before the top order
  std::vector<AuxiliaryDynamics> chains;
  size_t init_at = 0;
  for (int j = 0; j < sys.q; ++j) {
    const int kj = degrees.degree[static_cast<size_t>(j)];
    if (kj == top) continue;
    const double lo = sys.bounds.lower[j];
    const double hi = sys.bounds.upper[j];
    double u0 = 0.0;
    if (init_at < opts.initial_control.size())
      u0 = opts.initial_control[init_at];
    else if (!(lo < 0.0 && 0.0 < hi))
      u0 = 0.5 * (lo + hi);
    ++init_at;
    if (!(lo < u0 && u0 < hi)) {
      std::ostringstream msg;
      msg << "ihocbf: initial value " << u0 << " for control " << j + 1
          << " must be strictly inside [" << lo << ", " << hi << "]";
      throw std::invalid_argument(msg.str());
    }
    chains.push_back(AuxiliaryDynamics::integrator_chain(j, top - kj, u0));
  }

  IHOCBFSpec spec;
  spec.base_barrier = b;
  spec.degrees = degrees;
  spec.max_degree = top;
  spec.augmented = compose_augmented(sys, std::move(chains));

  HOCBFSpec inner;
  inner.barrier = lift_to_augmented(b, spec.augmented.aug_n());
  inner.degree = top;
  inner.alphas = std::move(alphas);
  inner.system = spec.augmented.sys;
  inner.probe = opts.probe;
  inner.name = "ihocbf";
  spec.main = build_psi_sequence(inner);

  // construction probe: every component of the augmented control must show
  // up at exactly the top order, or the method's premise fails
  RelativeDegreeSet check = detect_relative_degree_set(
      inner.barrier, spec.augmented.sys, opts.probe, top);
  for (int j = 0; j < spec.augmented.aug_q(); ++j)
    if (check.degree[static_cast<size_t>(j)] != top) {
      std::ostringstream msg;
      msg << "ihocbf: augmented control component " << j + 1
          << " does not appear at order " << top;
      throw SpecError(msg.str());
    }

  for (int c = 0; c < spec.augmented.chain_count(); ++c) {
    const AuxiliaryDynamics& aux = spec.augmented.aux[static_cast<size_t>(c)];
    NuBoundChain bound;
    bound.chain_sys = standalone_chain(aux);
    bound.u_min = sys.bounds.lower[aux.control_index];
    bound.u_max = sys.bounds.upper[aux.control_index];
    bound.nu_column = spec.augmented.nu_column[static_cast<size_t>(c)];
    bound.state_offset =
        spec.augmented.aux_state_offset[static_cast<size_t>(c)];
    bound.length = aux.length();

    const int m = aux.length();
    std::vector<ClassKFunction> bound_alphas(
        static_cast<size_t>(m), ClassKFunction::linear(opts.bound_alpha_gain));
    const double lo = bound.u_min;
    const double hi = bound.u_max;

    HOCBFSpec lower_spec;
    lower_spec.barrier = ScalarField(m, [lo](auto s) { return s[0] - lo; });
    lower_spec.degree = m;
    lower_spec.alphas = bound_alphas;
    lower_spec.system = bound.chain_sys;
    lower_spec.name = "u" + std::to_string(aux.control_index + 1) + "_lower";
    HOCBFSpec upper_spec;
    upper_spec.barrier = ScalarField(m, [hi](auto s) { return hi - s[0]; });
    upper_spec.degree = m;
    upper_spec.alphas = bound_alphas;
    upper_spec.system = bound.chain_sys;
    upper_spec.name = "u" + std::to_string(aux.control_index + 1) + "_upper";

    if (std::isfinite(lo)) bound.lower = build_psi_sequence(lower_spec);
    if (std::isfinite(hi)) bound.upper = build_psi_sequence(upper_spec);
    spec.bounds.push_back(std::move(bound));
  }
  return spec;
}

std::vector<ConstraintRow> ihocbf_rows(const IHOCBFSpec& spec,
                                       const Eigen::VectorXd& y) {
  if (y.size() != spec.augmented.aug_n())
    throw std::invalid_argument("ihocbf_rows: augmented state size mismatch");
  std::vector<ConstraintRow> rows;
  rows.push_back(spec.main.constraint_row(y));

  const int q = spec.augmented.aug_q();
  for (const NuBoundChain& bound : spec.bounds) {
    Eigen::VectorXd s = y.segment(bound.state_offset, bound.length);
    for (const PsiSequence* seq : {&bound.lower, &bound.upper}) {
      if (seq->degree() == 0) continue;  // that side is unbounded
      ConstraintRow chain_row = seq->constraint_row(s);
      ConstraintRow row;
      row.coeff = Eigen::RowVectorXd::Zero(q);
      row.coeff[bound.nu_column] = chain_row.coeff[0];
      row.rhs = chain_row.rhs;
      row.tag = chain_row.tag;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

Eigen::VectorXd integrate_aux(const IHOCBFSpec& spec,
                              const Eigen::VectorXd& aux_state,
                              const Eigen::VectorXd& nu, double dt,
                              IntegratorKind method) {
  if (nu.size() != static_cast<Eigen::Index>(spec.bounds.size()))
    throw std::invalid_argument("integrate_aux: one input per chain");
  Eigen::VectorXd out = aux_state;
  int at = 0;
  for (size_t c = 0; c < spec.bounds.size(); ++c) {
    const NuBoundChain& bound = spec.bounds[c];
    Eigen::VectorXd s = aux_state.segment(at, bound.length);
    Eigen::VectorXd input(1);
    input << nu[static_cast<Eigen::Index>(c)];
    out.segment(at, bound.length) =
        step_integrate(bound.chain_sys, s, input, dt, method);
    at += bound.length;
  }
  return out;
}

}  // namespace hocbf
