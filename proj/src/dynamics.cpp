#include "hocbf/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hocbf {

ControlBounds ControlBounds::box(Eigen::VectorXd lo, Eigen::VectorXd hi) {
  if (lo.size() != hi.size())
    throw std::invalid_argument("control bounds: dimension mismatch");
  for (int i = 0; i < lo.size(); ++i)
    if (!(lo[i] <= hi[i]))
      throw std::invalid_argument("control bounds: lower exceeds upper");
  return ControlBounds{std::move(lo), std::move(hi)};
}

ControlBounds ControlBounds::symmetric(const Eigen::VectorXd& magnitude) {
  return box(-magnitude, magnitude);
}

ControlBounds ControlBounds::unbounded(int q) {
  const double inf = std::numeric_limits<double>::infinity();
  return ControlBounds{Eigen::VectorXd::Constant(q, -inf),
                       Eigen::VectorXd::Constant(q, inf)};
}

Eigen::VectorXd AffineControlSystem::derivative(
    const Eigen::VectorXd& x, const Eigen::VectorXd& u) const {
  std::vector<double> dx = derivative<double>(
      std::span<const double>(x.data(), x.size()),
      std::span<const double>(u.data(), u.size()));
  return Eigen::Map<Eigen::VectorXd>(dx.data(), static_cast<Eigen::Index>(dx.size()));
}

AffineControlSystem make_unicycle(const UnicycleParams& params,
                                  ControlBounds bounds) {
  if (!(params.mass > 0.0))
    throw std::invalid_argument("unicycle: mass must be positive");
  if (bounds.dim() != 2)
    throw std::invalid_argument("unicycle: expected 2 control bounds");

  const double inv_mass = 1.0 / params.mass;
  AffineControlSystem sys;
  sys.n = 5;
  sys.q = 2;
  sys.bounds = std::move(bounds);
  sys.state_labels = {"x", "y", "v", "theta", "phi"};
  sys.control_labels = {"u1", "u2"};
  sys.f = VectorField(5, 5, [](auto x, auto out) {
    using T = typename std::remove_cvref_t<decltype(x)>::value_type;
    out[0] = x[2] * cos(x[3]);
    out[1] = x[2] * sin(x[3]);
    out[2] = T(0.0);
    out[3] = x[4];
    out[4] = T(0.0);
  });
  sys.g = MatrixField(5, 5, 2, [inv_mass](auto x, auto m) {
    using T = typename std::remove_cvref_t<decltype(x)>::value_type;
    (void)x;
    m.set_zero();
    m(4, 0) = T(1.0);       // phidot = u1
    m(2, 1) = T(inv_mass);  // vdot = u2 / M
  });
  return sys;
}

Eigen::VectorXd clamp_to_bounds(const Eigen::VectorXd& u,
                                const ControlBounds& bounds) {
  return u.cwiseMax(bounds.lower).cwiseMin(bounds.upper);
}

AuxiliaryDynamics AuxiliaryDynamics::integrator_chain(int control_index,
                                                      int length,
                                                      double initial_value) {
  if (length < 1)
    throw std::invalid_argument("auxiliary chain: length must be >= 1");
  AuxiliaryDynamics aux;
  aux.control_index = control_index;
  aux.chain_a = Eigen::MatrixXd::Zero(length, length);
  for (int k = 0; k + 1 < length; ++k) aux.chain_a(k, k + 1) = 1.0;
  aux.chain_g = Eigen::VectorXd::Unit(length, length - 1);
  aux.init = Eigen::VectorXd::Zero(length);
  aux.init[0] = initial_value;
  return aux;
}

AugmentedSystem compose_augmented(const AffineControlSystem& base,
                                  std::vector<AuxiliaryDynamics> aux) {
  std::sort(aux.begin(), aux.end(),
            [](const AuxiliaryDynamics& a, const AuxiliaryDynamics& b) {
              return a.control_index < b.control_index;
            });
  for (size_t c = 0; c < aux.size(); ++c) {
    const AuxiliaryDynamics& a = aux[c];
    if (a.control_index < 0 || a.control_index >= base.q)
      throw std::invalid_argument("compose_augmented: control index out of range");
    if (c > 0 && aux[c - 1].control_index == a.control_index)
      throw std::invalid_argument("compose_augmented: duplicate control index");
    const int m = a.length();
    if (a.chain_a.rows() != m || a.chain_a.cols() != m || a.chain_g.size() != m)
      throw std::invalid_argument("compose_augmented: inconsistent chain shape");
  }

  AugmentedSystem out;
  out.base_n = base.n;
  out.base_q = base.q;
  out.aux = std::move(aux);

  const int nd = out.chain_count();
  int total_aux = 0;
  out.aux_state_offset.resize(nd);
  for (int c = 0; c < nd; ++c) {
    out.aux_state_offset[c] = base.n + total_aux;
    total_aux += out.aux[c].length();
  }

  out.decision_of_base.assign(base.q, -1);
  out.aux_of_base.assign(base.q, -1);
  for (int c = 0; c < nd; ++c) out.aux_of_base[out.aux[c].control_index] = c;
  int col = 0;
  for (int j = 0; j < base.q; ++j)
    if (out.aux_of_base[j] < 0) out.decision_of_base[j] = col++;
  out.nu_column.resize(nd);
  for (int c = 0; c < nd; ++c) out.nu_column[c] = col++;

  const int aug_n = base.n + total_aux;
  const int aug_q = base.q;  // (q - N_d) direct + N_d chain inputs

  AffineControlSystem combined;
  combined.n = aug_n;
  combined.q = aug_q;
  combined.state_labels = base.state_labels;
  combined.control_labels.resize(aug_q);
  const double inf = std::numeric_limits<double>::infinity();
  combined.bounds.lower = Eigen::VectorXd::Constant(aug_q, -inf);
  combined.bounds.upper = Eigen::VectorXd::Constant(aug_q, inf);
  for (int j = 0; j < base.q; ++j) {
    if (out.decision_of_base[j] >= 0) {
      const int cj = out.decision_of_base[j];
      combined.bounds.lower[cj] = base.bounds.lower[j];
      combined.bounds.upper[cj] = base.bounds.upper[j];
      combined.control_labels[cj] =
          j < static_cast<int>(base.control_labels.size())
              ? base.control_labels[j]
              : "u" + std::to_string(j + 1);
    }
  }
  for (int c = 0; c < nd; ++c) {
    const int j = out.aux[c].control_index;
    combined.control_labels[out.nu_column[c]] =
        "nu_" + (j < static_cast<int>(base.control_labels.size())
                     ? base.control_labels[j]
                     : std::to_string(j + 1));
    for (int k = 0; k < out.aux[c].length(); ++k)
      combined.state_labels.push_back(
          combined.control_labels[out.nu_column[c]].substr(3) + "_chain" +
          std::to_string(k));
  }

  // Chain info captured by value for the field closures.
  struct ChainInfo {
    int base_control;
    int offset;
    Eigen::MatrixXd a;
    Eigen::VectorXd g;
  };
  std::vector<ChainInfo> chains;
  chains.reserve(nd);
  for (int c = 0; c < nd; ++c)
    chains.push_back({out.aux[c].control_index, out.aux_state_offset[c],
                      out.aux[c].chain_a, out.aux[c].chain_g});

  const int bn = base.n;
  const int bq = base.q;
  VectorField base_f = base.f;
  MatrixField base_g = base.g;

  combined.f = VectorField(aug_n, aug_n, [=](auto y, auto out_v) {
    using T = typename std::remove_cvref_t<decltype(y)>::value_type;
    auto x = y.first(static_cast<size_t>(bn));
    base_f.eval<T>(x, out_v.first(static_cast<size_t>(bn)));
    std::vector<T> gm(static_cast<size_t>(bn) * bq);
    base_g.eval<T>(x, gm);
    // chained controls act on the base rows as states
    for (const ChainInfo& ch : chains) {
      const T& uj = y[static_cast<size_t>(ch.offset)];
      for (int i = 0; i < bn; ++i)
        out_v[static_cast<size_t>(i)] += gm[i * bq + ch.base_control] * uj;
    }
    for (const ChainInfo& ch : chains) {
      const int m = static_cast<int>(ch.g.size());
      for (int r = 0; r < m; ++r) {
        T acc(0.0);
        for (int k = 0; k < m; ++k)
          acc += ch.a(r, k) * y[static_cast<size_t>(ch.offset + k)];
        out_v[static_cast<size_t>(ch.offset + r)] = acc;
      }
    }
  });

  std::vector<int> decision_of_base = out.decision_of_base;
  std::vector<int> nu_column = out.nu_column;
  combined.g = MatrixField(aug_n, aug_n, aug_q, [=](auto y, auto m) {
    using T = typename std::remove_cvref_t<decltype(y)>::value_type;
    m.set_zero();
    auto x = y.first(static_cast<size_t>(bn));
    std::vector<T> gm(static_cast<size_t>(bn) * bq);
    base_g.eval<T>(x, gm);
    for (int j = 0; j < bq; ++j) {
      const int cj = decision_of_base[j];
      if (cj < 0) continue;
      for (int i = 0; i < bn; ++i) m(i, cj) = gm[i * bq + j];
    }
    for (size_t c = 0; c < chains.size(); ++c) {
      const ChainInfo& ch = chains[c];
      const int mlen = static_cast<int>(ch.g.size());
      for (int r = 0; r < mlen; ++r)
        m(ch.offset + r, nu_column[c]) = T(ch.g[r]);
    }
  });

  out.sys = std::move(combined);
  return out;
}

Eigen::VectorXd AugmentedSystem::augment_state(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y(aug_n());
  y.head(base_n) = x;
  for (int c = 0; c < chain_count(); ++c)
    y.segment(aux_state_offset[c], aux[c].length()) = aux[c].init;
  return y;
}

Eigen::VectorXd AugmentedSystem::augment_state(
    const Eigen::VectorXd& x, const Eigen::VectorXd& aux_vals) const {
  Eigen::VectorXd y(aug_n());
  y.head(base_n) = x;
  y.tail(aug_n() - base_n) = aux_vals;
  return y;
}

Eigen::VectorXd AugmentedSystem::base_state(const Eigen::VectorXd& y) const {
  return y.head(base_n);
}

Eigen::VectorXd AugmentedSystem::aux_state(const Eigen::VectorXd& y) const {
  return y.tail(aug_n() - base_n);
}

Eigen::VectorXd AugmentedSystem::base_control(
    const Eigen::VectorXd& y, const Eigen::VectorXd& u_y) const {
  Eigen::VectorXd u(base_q);
  for (int j = 0; j < base_q; ++j) {
    if (decision_of_base[j] >= 0)
      u[j] = u_y[decision_of_base[j]];
    else
      u[j] = y[aux_state_offset[aux_of_base[j]]];
  }
  return u;
}

}  // namespace hocbf
