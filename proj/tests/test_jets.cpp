#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "hocbf/field.hpp"
#include "hocbf/jet.hpp"
#include "hocbf/lie.hpp"
#include "testbeds.hpp"

using namespace hocbf;

namespace {

// an assortment of smooth test fields for property checks
std::vector<ScalarField> smooth_fields() {
  std::vector<ScalarField> fields;
  fields.emplace_back(3, [](auto x) {
    return sin(x[0]) * cos(x[1]) + x[2] * x[2] * x[0];
  });
  fields.emplace_back(3, [](auto x) {
    return sqrt(1.0 + x[0] * x[0] + x[1] * x[1]) * tanh(x[2]);
  });
  fields.emplace_back(3, [](auto x) {
    return exp(0.3 * x[0]) + atan2(x[1] + 2.0, x[2] + 3.0);
  });
  fields.emplace_back(3, [](auto x) {
    return pow_int(x[0] + 2.0 * x[1], 3) / (4.0 + x[2] * x[2]);
  });
  return fields;
}

}  // namespace

TEST_CASE("jet arithmetic follows product and chain rules") {
  // d/dt [ (t^2+1) * sin(t) ] at t = 0.7, against a tight finite difference
  auto f = [](auto t) { return (t * t + 1.0) * sin(t); };
  Jet1 t{0.7, 1.0};
  Jet1 r = f(t);
  const double h = 1e-6;
  const double fd = (f(0.7 + h) - f(0.7 - h)) / (2.0 * h);
  CHECK(r.v == doctest::Approx(f(0.7)).epsilon(1e-14));
  CHECK(r.d == doctest::Approx(fd).epsilon(1e-8));

  // quotient and sqrt
  auto g = [](auto t) { return sqrt(t) / (1.0 + t); };
  Jet1 s{2.0, 1.0};
  const double gd = (g(2.0 + h) - g(2.0 - h)) / (2.0 * h);
  CHECK(g(s).d == doctest::Approx(gd).epsilon(1e-8));
}

TEST_CASE("nested jets produce second derivatives") {
  // f(t) = sin(t): f'' = -sin(t)
  Jet2 t{Jet1{0.4, 1.0}, Jet1{1.0, 0.0}};
  Jet2 r = sin(t);
  CHECK(r.d.d == doctest::Approx(-std::sin(0.4)).epsilon(1e-14));
}

TEST_CASE("plain and zero-seeded jet evaluation agree") {
  for (const ScalarField& h : smooth_fields()) {
    Eigen::Vector3d x(0.3, -0.8, 1.2);
    std::vector<Jet1> xj{Jet1{0.3}, Jet1{-0.8}, Jet1{1.2}};
    const double plain = h(x);
    CHECK(h.eval<Jet1>(xj).v == doctest::Approx(plain).epsilon(1e-15));
  }
}

TEST_CASE("gradient: dot-square field") {
  ScalarField h(2, [](auto x) { return x[0] * x[0] + x[1] * x[1]; });
  Eigen::Vector2d x(1.0, 2.0);
  Eigen::VectorXd g = gradient(h, x);
  CHECK(g[0] == doctest::Approx(2.0));
  CHECK(g[1] == doctest::Approx(4.0));
}

TEST_CASE("gradient: planar distance barrier at the collinear state") {
  ScalarField b = testbed::distance_barrier(35.0, 15.0, 5.0);
  Eigen::VectorXd x(5);
  x << 10.0, 15.0, 5.0, 0.0, 0.0;
  Eigen::VectorXd g = gradient(b, x);
  CHECK(g[0] == doctest::Approx(-1.0).epsilon(1e-12));
  for (int i = 1; i < 5; ++i) CHECK(std::abs(g[i]) < 1e-12);
}

TEST_CASE("gradient: sin-cos product at the origin") {
  ScalarField h(2, [](auto x) { return sin(x[0]) * cos(x[1]); });
  Eigen::Vector2d x(0.0, 0.0);
  Eigen::VectorXd g = gradient(h, x);
  CHECK(g[0] == doctest::Approx(1.0));
  CHECK(g[1] == doctest::Approx(0.0));
}

TEST_CASE("gradient matches central finite differences on random fields") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (const ScalarField& h : smooth_fields()) {
    for (int trial = 0; trial < 40; ++trial) {
      Eigen::Vector3d x(unit(rng), unit(rng), unit(rng));
      Eigen::VectorXd g = gradient(h, x);
      for (int i = 0; i < 3; ++i) {
        const double fd = testbed::directional_fd(
            [&](const Eigen::VectorXd& s) { return h(s); }, x,
            Eigen::Vector3d::Unit(i));
        CHECK(std::abs(g[i] - fd) <= 1e-6 * (1.0 + g.cwiseAbs().maxCoeff()));
      }
    }
  }
}

TEST_CASE("lie_along_f: unicycle distance barrier, frozen value") {
  AffineControlSystem sys = testbed::default_unicycle();
  ScalarField b = testbed::distance_barrier(35.0, 15.0, 5.0);
  ScalarField lfb = lie_along_f(b, sys);
  Eigen::VectorXd x(5);
  x << 10.0, 15.0, 5.0, 0.0, 0.0;
  CHECK(lfb(x) == doctest::Approx(-5.0).epsilon(1e-12));
}

TEST_CASE("lie_along_f: constant barrier has zero derivative everywhere") {
  AffineControlSystem sys = testbed::default_unicycle();
  ScalarField c(5, [](auto x) {
    using T = typename std::remove_cvref_t<decltype(x)>::value_type;
    (void)x;
    return T(7.5);
  });
  ScalarField lfc = lie_along_f(c, sys);
  for (const Eigen::VectorXd& x :
       sample_box(Eigen::VectorXd::Constant(5, -3.0),
                  Eigen::VectorXd::Constant(5, 3.0), 20, 7)) {
    CHECK(lfc(x) == doctest::Approx(0.0));
  }
}

TEST_CASE("lie_along_f composes: integrator chain") {
  // f = (x2, 0), h = x1: Lf h = x2, Lf^2 h = 0
  AffineControlSystem sys = testbed::double_integrator();
  ScalarField h(2, [](auto x) { return x[0] + 0.0 * x[1]; });
  ScalarField lf1 = lie_along_f(h, sys);
  ScalarField lf2 = lie_along_f(lf1, sys);
  Eigen::Vector2d x(0.3, -1.7);
  CHECK(lf1(x) == doctest::Approx(-1.7));
  CHECK(lf2(x) == doctest::Approx(0.0));
}

TEST_CASE("lie_along_g: barrier row is zero at order one") {
  AffineControlSystem sys = testbed::default_unicycle();
  ScalarField b = testbed::distance_barrier(35.0, 15.0, 5.0);
  VectorField row = lie_along_g(b, sys);
  for (const Eigen::VectorXd& x :
       sample_box(Eigen::VectorXd::Constant(5, -2.0),
                  Eigen::VectorXd::Constant(5, 2.0), 30, 11)) {
    Eigen::VectorXd r = row(x);
    CHECK(std::abs(r[0]) < 1e-15);
    CHECK(std::abs(r[1]) < 1e-15);
  }
}

TEST_CASE("lie_along_g: second-order row hits the drive control") {
  const double mass = 1650.0;
  AffineControlSystem sys = testbed::default_unicycle(mass);
  ScalarField b = testbed::distance_barrier(35.0, 15.0, 5.0);
  VectorField row = lie_along_g(lie_along_f(b, sys), sys);
  Eigen::VectorXd x(5);
  x << 10.0, 15.0, 5.0, 0.0, 0.0;
  Eigen::VectorXd r = row(x);
  CHECK(r[0] == doctest::Approx(0.0));
  CHECK(r[1] == doctest::Approx(-1.0 / mass).epsilon(1e-12));
}

TEST_CASE("lie_along_g: direct speed output") {
  const double mass = 1650.0;
  AffineControlSystem sys = testbed::default_unicycle(mass);
  ScalarField h(5, [](auto x) { return x[2] * 1.0; });
  VectorField row = lie_along_g(h, sys);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(5);
  Eigen::VectorXd r = row(x);
  CHECK(r[0] == doctest::Approx(0.0));
  CHECK(r[1] == doctest::Approx(1.0 / mass).epsilon(1e-14));
}

TEST_CASE("nesting soundness: composed Lf^2 equals one depth-2 flow jet") {
  AffineControlSystem sys = testbed::default_unicycle();
  ScalarField b = testbed::distance_barrier(35.0, 15.0, 5.0);
  ScalarField lf2 = lie_along_f(lie_along_f(b, sys), sys);

  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd x(5);
    for (int i = 0; i < 5; ++i) x[i] = 3.0 * unit(rng);

    // second Taylor coefficient of t -> b(x(t)) along xdot = f(x):
    // seed value = x, first derivative = f(x), second = Jf(x) f(x)
    Eigen::VectorXd v = sys.f(x);
    std::vector<Jet1> xj(5);
    for (int i = 0; i < 5; ++i) xj[i] = Jet1{x[i], v[i]};
    std::vector<Jet1> fj = sys.f.eval<Jet1>(xj);
    std::vector<Jet2> flow(5);
    for (int i = 0; i < 5; ++i)
      flow[i] = Jet2{Jet1{x[i], v[i]}, Jet1{v[i], fj[static_cast<size_t>(i)].d}};
    const double taylor2 = b.eval<Jet2>(flow).d.d;
    CHECK(lf2(x) == doctest::Approx(taylor2).epsilon(1e-10));
  }
}

TEST_CASE("depth budget: order four works, exhausting the stack reports") {
  AffineControlSystem sys = testbed::default_unicycle();
  ScalarField b = testbed::distance_barrier(35.0, 15.0, 5.0);
  ScalarField level = b;
  for (int k = 0; k < 4; ++k) level = lie_along_f(level, sys);
  Eigen::VectorXd x(5);
  x << 10.0, 15.0, 5.0, 0.2, 0.1;
  CHECK(std::isfinite(level(x)));  // L_f^4 b

  ScalarField too_deep = b;
  for (int k = 0; k < kMaxJetDepth + 1; ++k)
    too_deep = lie_along_f(too_deep, sys);
  CHECK_THROWS_AS((void)too_deep(x), EvalError);
}

TEST_CASE("non-smooth points report the offending primitive") {
  ScalarField b = testbed::distance_barrier(0.0, 0.0, 1.0, 2);
  Eigen::Vector2d origin(0.0, 0.0);
  CHECK_THROWS_WITH_AS((void)b(origin),
                       doctest::Contains("sqrt"), EvalError);
  ScalarField bad_atan(2, [](auto x) { return atan2(x[0], x[1]); });
  CHECK_THROWS_AS((void)gradient(bad_atan, origin), EvalError);
}
