#ifndef HOCBF_FIELD_HPP
#define HOCBF_FIELD_HPP

#include <Eigen/Core>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "hocbf/jet.hpp"

namespace hocbf {

using Jet1 = Jet<double>;
using Jet2 = Jet<Jet1>;
using Jet3 = Jet<Jet2>;
using Jet4 = Jet<Jet3>;
using Jet5 = Jet<Jet4>;
using Jet6 = Jet<Jet5>;

// Highest nesting level a field can be evaluated at. Degree detection with
// the default cap of 5 needs all of it; the case study needs 3.
inline constexpr int kMaxJetDepth = 6;

// Lightweight row-major matrix view used by MatrixField evaluation.
template <class T>
struct MatView {
  T* data = nullptr;
  int rows = 0;
  int cols = 0;
  T& operator()(int i, int j) const { return data[i * cols + j]; }
  void set_zero() const {
    for (int i = 0; i < rows * cols; ++i) data[i] = T(0.0);
  }
};

namespace detail {

class ScalarFieldImpl {
 public:
  virtual ~ScalarFieldImpl() = default;
  virtual double ev(std::span<const double>) const = 0;
  virtual Jet1 ev(std::span<const Jet1>) const = 0;
  virtual Jet2 ev(std::span<const Jet2>) const = 0;
  virtual Jet3 ev(std::span<const Jet3>) const = 0;
  virtual Jet4 ev(std::span<const Jet4>) const = 0;
  virtual Jet5 ev(std::span<const Jet5>) const = 0;
  virtual Jet6 ev(std::span<const Jet6>) const = 0;
};

template <class F>
class ScalarFieldFn final : public ScalarFieldImpl {
 public:
  explicit ScalarFieldFn(F fn) : fn_(std::move(fn)) {}
  double ev(std::span<const double> x) const override { return fn_(x); }
  Jet1 ev(std::span<const Jet1> x) const override { return fn_(x); }
  Jet2 ev(std::span<const Jet2> x) const override { return fn_(x); }
  Jet3 ev(std::span<const Jet3> x) const override { return fn_(x); }
  Jet4 ev(std::span<const Jet4> x) const override { return fn_(x); }
  Jet5 ev(std::span<const Jet5> x) const override { return fn_(x); }
  Jet6 ev(std::span<const Jet6> x) const override { return fn_(x); }

 private:
  F fn_;
};

class VectorFieldImpl {
 public:
  virtual ~VectorFieldImpl() = default;
  virtual void ev(std::span<const double>, std::span<double>) const = 0;
  virtual void ev(std::span<const Jet1>, std::span<Jet1>) const = 0;
  virtual void ev(std::span<const Jet2>, std::span<Jet2>) const = 0;
  virtual void ev(std::span<const Jet3>, std::span<Jet3>) const = 0;
  virtual void ev(std::span<const Jet4>, std::span<Jet4>) const = 0;
  virtual void ev(std::span<const Jet5>, std::span<Jet5>) const = 0;
  virtual void ev(std::span<const Jet6>, std::span<Jet6>) const = 0;
};

template <class F>
class VectorFieldFn final : public VectorFieldImpl {
 public:
  explicit VectorFieldFn(F fn) : fn_(std::move(fn)) {}
  void ev(std::span<const double> x, std::span<double> o) const override {
    fn_(x, o);
  }
  void ev(std::span<const Jet1> x, std::span<Jet1> o) const override {
    fn_(x, o);
  }
  void ev(std::span<const Jet2> x, std::span<Jet2> o) const override {
    fn_(x, o);
  }
  void ev(std::span<const Jet3> x, std::span<Jet3> o) const override {
    fn_(x, o);
  }
  void ev(std::span<const Jet4> x, std::span<Jet4> o) const override {
    fn_(x, o);
  }
  void ev(std::span<const Jet5> x, std::span<Jet5> o) const override {
    fn_(x, o);
  }
  void ev(std::span<const Jet6> x, std::span<Jet6> o) const override {
    fn_(x, o);
  }

 private:
  F fn_;
};

class MatrixFieldImpl {
 public:
  virtual ~MatrixFieldImpl() = default;
  virtual void ev(std::span<const double>, MatView<double>) const = 0;
  virtual void ev(std::span<const Jet1>, MatView<Jet1>) const = 0;
  virtual void ev(std::span<const Jet2>, MatView<Jet2>) const = 0;
  virtual void ev(std::span<const Jet3>, MatView<Jet3>) const = 0;
  virtual void ev(std::span<const Jet4>, MatView<Jet4>) const = 0;
  virtual void ev(std::span<const Jet5>, MatView<Jet5>) const = 0;
  virtual void ev(std::span<const Jet6>, MatView<Jet6>) const = 0;
};

template <class F>
class MatrixFieldFn final : public MatrixFieldImpl {
 public:
  explicit MatrixFieldFn(F fn) : fn_(std::move(fn)) {}
  void ev(std::span<const double> x, MatView<double> m) const override {
    fn_(x, m);
  }
  void ev(std::span<const Jet1> x, MatView<Jet1> m) const override {
    fn_(x, m);
  }
  void ev(std::span<const Jet2> x, MatView<Jet2> m) const override {
    fn_(x, m);
  }
  void ev(std::span<const Jet3> x, MatView<Jet3> m) const override {
    fn_(x, m);
  }
  void ev(std::span<const Jet4> x, MatView<Jet4> m) const override {
    fn_(x, m);
  }
  void ev(std::span<const Jet5> x, MatView<Jet5> m) const override {
    fn_(x, m);
  }
  void ev(std::span<const Jet6> x, MatView<Jet6> m) const override {
    fn_(x, m);
  }

 private:
  F fn_;
};

}  // namespace detail

/* A scalar function of the state, polymorphic in the scalar carrier:
 * the same closure evaluates on plain doubles and on nested jets up to
 * kMaxJetDepth, which is what lets Lie derivatives compose. Copies are
 * shallow (shared immutable implementation). */
class ScalarField {
 public:
  ScalarField() = default;
  template <class F,
            std::enable_if_t<!std::is_same_v<std::remove_cvref_t<F>,
                                             ScalarField>,
                             int> = 0>
  ScalarField(int arity, F fn)
      : arity_(arity),
        impl_(std::make_shared<const detail::ScalarFieldFn<std::remove_cvref_t<F>>>(
            std::forward<F>(fn))) {}

  int arity() const { return arity_; }
  explicit operator bool() const { return impl_ != nullptr; }

  template <class T>
  T eval(std::span<const T> x) const {
    return impl_->ev(x);
  }
  double operator()(std::span<const double> x) const { return eval<double>(x); }
  double operator()(const Eigen::VectorXd& x) const {
    return eval<double>(std::span<const double>(x.data(), x.size()));
  }

 private:
  int arity_ = 0;
  std::shared_ptr<const detail::ScalarFieldImpl> impl_;
};

/// Vector-valued counterpart of ScalarField (e.g. system drift).
class VectorField {
 public:
  VectorField() = default;
  template <class F,
            std::enable_if_t<!std::is_same_v<std::remove_cvref_t<F>,
                                             VectorField>,
                             int> = 0>
  VectorField(int arity, int dim, F fn)
      : arity_(arity),
        dim_(dim),
        impl_(std::make_shared<const detail::VectorFieldFn<std::remove_cvref_t<F>>>(
            std::forward<F>(fn))) {}

  int arity() const { return arity_; }
  int dim() const { return dim_; }
  explicit operator bool() const { return impl_ != nullptr; }

  template <class T>
  void eval(std::span<const T> x, std::span<T> out) const {
    impl_->ev(x, out);
  }
  template <class T>
  std::vector<T> eval(std::span<const T> x) const {
    std::vector<T> out(static_cast<size_t>(dim_));
    impl_->ev(x, std::span<T>(out));
    return out;
  }
  Eigen::VectorXd operator()(const Eigen::VectorXd& x) const {
    Eigen::VectorXd out(dim_);
    impl_->ev(std::span<const double>(x.data(), x.size()),
              std::span<double>(out.data(), static_cast<size_t>(out.size())));
    return out;
  }

 private:
  int arity_ = 0;
  int dim_ = 0;
  std::shared_ptr<const detail::VectorFieldImpl> impl_;
};

/// Matrix-valued field (e.g. the control directions g(x)), row-major.
class MatrixField {
 public:
  MatrixField() = default;
  template <class F,
            std::enable_if_t<!std::is_same_v<std::remove_cvref_t<F>,
                                             MatrixField>,
                             int> = 0>
  MatrixField(int arity, int rows, int cols, F fn)
      : arity_(arity),
        rows_(rows),
        cols_(cols),
        impl_(std::make_shared<const detail::MatrixFieldFn<std::remove_cvref_t<F>>>(
            std::forward<F>(fn))) {}

  int arity() const { return arity_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  explicit operator bool() const { return impl_ != nullptr; }

  // out must hold rows()*cols() entries, row-major.
  template <class T>
  void eval(std::span<const T> x, std::span<T> out) const {
    impl_->ev(x, MatView<T>{out.data(), rows_, cols_});
  }
  Eigen::MatrixXd operator()(const Eigen::VectorXd& x) const {
    std::vector<double> buf(static_cast<size_t>(rows_) * cols_);
    eval<double>(std::span<const double>(x.data(), x.size()),
                 std::span<double>(buf));
    Eigen::MatrixXd m(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) m(i, j) = buf[i * cols_ + j];
    return m;
  }

 private:
  int arity_ = 0;
  int rows_ = 0;
  int cols_ = 0;
  std::shared_ptr<const detail::MatrixFieldImpl> impl_;
};

}  // namespace hocbf

#endif  // HOCBF_FIELD_HPP
