#ifndef HOCBF_JET_HPP
#define HOCBF_JET_HPP

#include <cmath>
#include <stdexcept>
#include <type_traits>

namespace hocbf {

// Raised when a primitive or field cannot be evaluated: domain error
// (sqrt at zero, atan2 at the origin), division by zero, or a request
// for one more differentiation level than the build supports.
class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/* Jet<T> is a first-order dual number over an arbitrary scalar carrier:
 * value plus the first-derivative coefficient along one seeded direction.
 * Nesting the carrier (Jet<Jet<double>>, ...) yields one extra
 * differentiation order per level, so directional derivatives of any
 * order are obtained by evaluating ordinary arithmetic on nested jets.
 * Only smooth primitives are provided; non-smooth points raise EvalError
 * instead of propagating NaNs. */
template <class T>
struct Jet {
  T v{};  // value
  T d{};  // derivative along the seeded direction

  Jet() = default;
  Jet(const T& value) : v(value) {}
  Jet(const T& value, const T& deriv) : v(value), d(deriv) {}

  template <class U, std::enable_if_t<std::is_arithmetic_v<U> &&
                                          !std::is_same_v<U, T>,
                                      int> = 0>
  Jet(U value) : v(static_cast<double>(value)) {}

  Jet& operator+=(const Jet& o) {
    v = v + o.v;
    d = d + o.d;
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    v = v - o.v;
    d = d - o.d;
    return *this;
  }
};

// ---- depth bookkeeping ----

template <class T>
struct JetDepth {
  static constexpr int value = 0;
};
template <class T>
struct JetDepth<Jet<T>> {
  static constexpr int value = JetDepth<T>::value + 1;
};
template <class T>
inline constexpr int jet_depth_v = JetDepth<std::remove_cvref_t<T>>::value;

// innermost plain value
inline double scalar_value(double x) { return x; }
template <class T>
double scalar_value(const Jet<T>& x) {
  return scalar_value(x.v);
}

// ---- arithmetic ----

template <class T>
Jet<T> operator-(const Jet<T>& a) {
  return {-a.v, -a.d};
}

template <class T>
Jet<T> operator+(const Jet<T>& a, const Jet<T>& b) {
  return {a.v + b.v, a.d + b.d};
}
template <class T>
Jet<T> operator-(const Jet<T>& a, const Jet<T>& b) {
  return {a.v - b.v, a.d - b.d};
}
template <class T>
Jet<T> operator*(const Jet<T>& a, const Jet<T>& b) {
  return {a.v * b.v, a.v * b.d + a.d * b.v};
}
template <class T>
Jet<T> operator/(const Jet<T>& a, const Jet<T>& b) {
  if (scalar_value(b.v) == 0.0) throw EvalError("division by zero");
  return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)};
}

template <class T, class U, std::enable_if_t<std::is_arithmetic_v<U>, int> = 0>
Jet<T> operator+(const Jet<T>& a, U c) {
  return {a.v + static_cast<double>(c), a.d};
}
template <class T, class U, std::enable_if_t<std::is_arithmetic_v<U>, int> = 0>
Jet<T> operator+(U c, const Jet<T>& a) {
  return a + c;
}
template <class T, class U, std::enable_if_t<std::is_arithmetic_v<U>, int> = 0>
Jet<T> operator-(const Jet<T>& a, U c) {
  return {a.v - static_cast<double>(c), a.d};
}
template <class T, class U, std::enable_if_t<std::is_arithmetic_v<U>, int> = 0>
Jet<T> operator-(U c, const Jet<T>& a) {
  return {static_cast<double>(c) - a.v, -a.d};
}
template <class T, class U, std::enable_if_t<std::is_arithmetic_v<U>, int> = 0>
Jet<T> operator*(const Jet<T>& a, U c) {
  return {a.v * static_cast<double>(c), a.d * static_cast<double>(c)};
}
template <class T, class U, std::enable_if_t<std::is_arithmetic_v<U>, int> = 0>
Jet<T> operator*(U c, const Jet<T>& a) {
  return a * c;
}
template <class T, class U, std::enable_if_t<std::is_arithmetic_v<U>, int> = 0>
Jet<T> operator/(const Jet<T>& a, U c) {
  if (static_cast<double>(c) == 0.0) throw EvalError("division by zero");
  return {a.v / static_cast<double>(c), a.d / static_cast<double>(c)};
}
template <class T, class U, std::enable_if_t<std::is_arithmetic_v<U>, int> = 0>
Jet<T> operator/(U c, const Jet<T>& a) {
  return Jet<T>(static_cast<double>(c)) / a;
}

// ---- smooth primitives ----
// Plain-scalar forwarders let generic field code call these unqualified.
// They are templates so the C library's non-template math functions still
// win overload resolution in code that mixes both namespaces.

template <class U, std::enable_if_t<std::is_arithmetic_v<U>, int> = 0>
double sin(U x) {
  return std::sin(static_cast<double>(x));
}
template <class U, std::enable_if_t<std::is_arithmetic_v<U>, int> = 0>
double cos(U x) {
  return std::cos(static_cast<double>(x));
}
template <class U, std::enable_if_t<std::is_arithmetic_v<U>, int> = 0>
double exp(U x) {
  return std::exp(static_cast<double>(x));
}
template <class U, std::enable_if_t<std::is_arithmetic_v<U>, int> = 0>
double tanh(U x) {
  return std::tanh(static_cast<double>(x));
}
template <class U, std::enable_if_t<std::is_arithmetic_v<U>, int> = 0>
double sqrt(U xin) {
  const double x = static_cast<double>(xin);
  if (!(x > 0.0)) throw EvalError("sqrt: argument not strictly positive");
  return std::sqrt(x);
}
template <class U, std::enable_if_t<std::is_arithmetic_v<U>, int> = 0>
double log(U xin) {
  const double x = static_cast<double>(xin);
  if (!(x > 0.0)) throw EvalError("log: argument not strictly positive");
  return std::log(x);
}
template <class U, class V,
          std::enable_if_t<std::is_arithmetic_v<U> && std::is_arithmetic_v<V>,
                           int> = 0>
double atan2(U yin, V xin) {
  const double y = static_cast<double>(yin);
  const double x = static_cast<double>(xin);
  if (y == 0.0 && x == 0.0) throw EvalError("atan2: both arguments zero");
  return std::atan2(y, x);
}

template <class T>
Jet<T> sin(const Jet<T>& x) {
  return {sin(x.v), x.d * cos(x.v)};
}
template <class T>
Jet<T> cos(const Jet<T>& x) {
  return {cos(x.v), -(x.d * sin(x.v))};
}
template <class T>
Jet<T> exp(const Jet<T>& x) {
  T e = exp(x.v);
  return {e, x.d * e};
}
template <class T>
Jet<T> tanh(const Jet<T>& x) {
  T t = tanh(x.v);
  return {t, x.d * (1.0 - t * t)};
}
template <class T>
Jet<T> sqrt(const Jet<T>& x) {
  if (!(scalar_value(x.v) > 0.0))
    throw EvalError("sqrt: argument not strictly positive");
  T s = sqrt(x.v);
  return {s, x.d / (s * 2.0)};
}
template <class T>
Jet<T> log(const Jet<T>& x) {
  if (!(scalar_value(x.v) > 0.0))
    throw EvalError("log: argument not strictly positive");
  return {log(x.v), x.d / x.v};
}
template <class T>
Jet<T> atan2(const Jet<T>& y, const Jet<T>& x) {
  if (scalar_value(y.v) == 0.0 && scalar_value(x.v) == 0.0)
    throw EvalError("atan2: both arguments zero");
  T denom = x.v * x.v + y.v * y.v;
  return {atan2(y.v, x.v), (x.v * y.d - y.v * x.d) / denom};
}

inline double pow_int(double x, int k) {
  if (k < 0) {
    if (x == 0.0) throw EvalError("pow_int: zero base, negative exponent");
    return 1.0 / pow_int(x, -k);
  }
  double r = 1.0;
  double b = x;
  for (; k > 0; k >>= 1, b = b * b)
    if (k & 1) r = r * b;
  return r;
}

template <class T>
Jet<T> pow_int(const Jet<T>& x, int k) {
  if (k < 0) return 1.0 / pow_int(x, -k);
  Jet<T> r(1.0);
  Jet<T> b = x;
  for (; k > 0; k >>= 1, b = b * b)
    if (k & 1) r = r * b;
  return r;
}

// sign(x)*|x|^p, strictly increasing on the reals for p >= 1.
inline double signed_pow(double x, double p) {
  if (p < 1.0) throw EvalError("signed_pow: exponent below 1");
  if (x > 0.0) return std::pow(x, p);
  if (x < 0.0) return -std::pow(-x, p);
  return 0.0;
}

template <class T>
Jet<T> signed_pow(const Jet<T>& x, double p) {
  if (p < 1.0) throw EvalError("signed_pow: exponent below 1");
  double s = scalar_value(x.v);
  if (s > 0.0) return exp(log(x) * p);
  if (s < 0.0) return -exp(log(-x) * p);
  // at zero the value is 0; derivative is 0 for p > 1 and identity for p = 1
  if (p == 1.0) return x;
  return Jet<T>(0.0);
}

}  // namespace hocbf

#endif  // HOCBF_JET_HPP
