#ifndef HOCBF_LIE_HPP
#define HOCBF_LIE_HPP

#include <Eigen/Core>
#include <span>
#include <stdexcept>
#include <vector>

#include "hocbf/dynamics.hpp"
#include "hocbf/field.hpp"

namespace hocbf {

// Exact gradient of h at x, one unit-seeded jet pass per coordinate.
inline Eigen::VectorXd gradient(const ScalarField& h,
                                std::span<const double> x) {
  const int n = h.arity();
  if (static_cast<int>(x.size()) != n)
    throw std::invalid_argument("gradient: state dimension mismatch");
  std::vector<Jet1> seeded(x.begin(), x.end());
  Eigen::VectorXd grad(n);
  for (int i = 0; i < n; ++i) {
    seeded[i].d = 1.0;
    grad[i] = h.eval<Jet1>(seeded).d;
    seeded[i].d = 0.0;
  }
  return grad;
}

inline Eigen::VectorXd gradient(const ScalarField& h,
                                const Eigen::VectorXd& x) {
  return gradient(h, std::span<const double>(x.data(), x.size()));
}

/* x -> grad h(x) . f(x), realized as the directional derivative of h along
 * f(x). The result is again a ScalarField over the jet algebra, so repeated
 * application yields higher-order Lie derivatives (each level consumes one
 * unit of the jet depth budget). */
inline ScalarField lie_along_f(const ScalarField& h, const VectorField& f) {
  if (h.arity() != f.arity() || f.dim() != f.arity())
    throw std::invalid_argument("lie_along_f: field shapes incompatible");
  const int n = h.arity();
  return ScalarField(n, [h, f, n](auto x) {
    using T = typename std::remove_cvref_t<decltype(x)>::value_type;
    if constexpr (jet_depth_v<T> >= kMaxJetDepth) {
      throw EvalError("lie_along_f: jet depth budget exceeded");
      return T{};
    } else {
      std::vector<T> fx(static_cast<size_t>(n));
      f.eval<T>(x, fx);
      std::vector<Jet<T>> seeded(static_cast<size_t>(n));
      for (int i = 0; i < n; ++i)
        seeded[i] = Jet<T>(x[static_cast<size_t>(i)], fx[static_cast<size_t>(i)]);
      return h.eval<Jet<T>>(seeded).d;
    }
  });
}

inline ScalarField lie_along_f(const ScalarField& h,
                               const AffineControlSystem& sys) {
  return lie_along_f(h, sys.f);
}

// x -> grad h(x) . g(x): the q-row of control coefficients, one directional
// pass per column of g.
inline VectorField lie_along_g(const ScalarField& h, const MatrixField& g) {
  if (h.arity() != g.arity() || g.rows() != g.arity())
    throw std::invalid_argument("lie_along_g: field shapes incompatible");
  const int n = h.arity();
  const int q = g.cols();
  return VectorField(n, q, [h, g, n, q](auto x, auto out) {
    using T = typename std::remove_cvref_t<decltype(x)>::value_type;
    if constexpr (jet_depth_v<T> >= kMaxJetDepth) {
      throw EvalError("lie_along_g: jet depth budget exceeded");
    } else {
      std::vector<T> gm(static_cast<size_t>(n) * q);
      g.eval<T>(x, gm);
      std::vector<Jet<T>> seeded(static_cast<size_t>(n));
      for (int i = 0; i < n; ++i) seeded[i] = Jet<T>(x[static_cast<size_t>(i)]);
      for (int j = 0; j < q; ++j) {
        for (int i = 0; i < n; ++i)
          seeded[i].d = gm[static_cast<size_t>(i) * q + j];
        out[static_cast<size_t>(j)] = h.eval<Jet<T>>(seeded).d;
      }
    }
  });
}

inline VectorField lie_along_g(const ScalarField& h,
                               const AffineControlSystem& sys) {
  return lie_along_g(h, sys.g);
}

}  // namespace hocbf

#endif  // HOCBF_LIE_HPP
