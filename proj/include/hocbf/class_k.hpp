#ifndef HOCBF_CLASS_K_HPP
#define HOCBF_CLASS_K_HPP

#include <limits>
#include <stdexcept>

#include "hocbf/jet.hpp"

namespace hocbf {

/* Strictly increasing functions with alpha(0) = 0. The linear kind is
 * smooth everywhere and doubles as an extended class-K map on the whole
 * real line; the power kind is sign(s)*k*|s|^p. Evaluable on jets so it
 * can sit inside differentiated barrier chains. */
struct ClassKFunction {
  enum class Kind { linear, power, extended_linear };

  Kind kind = Kind::linear;
  double gain = 1.0;
  double exponent = 1.0;
  // Declared differentiability order. Chains that differentiate an alpha
  // check this; it is taken on trust for user-supplied nonlinear kinds.
  int smoothness = std::numeric_limits<int>::max();

  static ClassKFunction linear(double k) {
    require_gain(k);
    return ClassKFunction{Kind::linear, k, 1.0,
                          std::numeric_limits<int>::max()};
  }
  static ClassKFunction extended_linear(double k) {
    require_gain(k);
    return ClassKFunction{Kind::extended_linear, k, 1.0,
                          std::numeric_limits<int>::max()};
  }
  static ClassKFunction power(double k, double p, int smoothness_order = 1) {
    require_gain(k);
    if (!(p >= 1.0))
      throw std::invalid_argument("class-K power: exponent must be >= 1");
    return ClassKFunction{Kind::power, k, p, smoothness_order};
  }

  template <class T>
  T operator()(const T& s) const {
    switch (kind) {
      case Kind::linear:
      case Kind::extended_linear:
        return s * gain;
      case Kind::power:
        return signed_pow(s, exponent) * gain;
    }
    throw std::logic_error("class-K: unknown kind");
  }

 private:
  static void require_gain(double k) {
    if (!(k > 0.0))
      throw std::invalid_argument("class-K: gain must be positive");
  }
};

}  // namespace hocbf

#endif  // HOCBF_CLASS_K_HPP
