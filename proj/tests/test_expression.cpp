#include <doctest.h>

#include "ucp/expression.hpp"

#include <cmath>
#include <random>

using namespace ucp;

TEST_CASE("values") {
  const Point x = (Vec(3) << 0.5, 3.0, 4.0).finished();
  CHECK(Expression::parse("norm(y) - 1 - t", 3).value(x) == doctest::Approx(3.5));
  CHECK(Expression::parse("x1 + 2*x2 - x3/4", 3).value(x) == doctest::Approx(5.5));
  CHECK(Expression::parse("-2^2", 3).value(x) == doctest::Approx(-4.0));
  CHECK(Expression::parse("2^3^2", 3).value(x) == doctest::Approx(512.0));
  CHECK(Expression::parse("(1 + y1) * (t - 1)", 3).value(x) == doctest::Approx(-2.0));
  CHECK(Expression::parse("sqrt(y1*y1 + y2^2)", 3).value(x) == doctest::Approx(5.0));
  CHECK(Expression::parse("norm(t, y2)", 3).value(x) == doctest::Approx(std::sqrt(16.25)));
  CHECK(Expression::parse("exp(0) + log(1) + sin(0) + cos(0) + tanh(0) + abs(-2)", 3).value(x) ==
        doctest::Approx(4.0));
  CHECK(Expression::parse("pi", 3).value(x) == doctest::Approx(M_PI));
  CHECK(Expression::parse("1.5e-1 * 2", 3).value(x) == doctest::Approx(0.3));
}

TEST_CASE("jets match finite differences") {
  const std::vector<std::string> texts = {
      "norm(y) - 1 + 2*t",
      "exp(0.3*t) * sin(y1) / (2 + cos(y2))",
      "y1^3 - 2*t*y2 + sqrt(1 + t^2)",
      "(1 + y1^2)^(0.5 + 0.1*t)",
      "log(2 + y1*y2) * tanh(t)",
  };
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-0.7, 0.7);
  for (const auto& s : texts) {
    const Expression e = Expression::parse(s, 3);
    const ScalarField fd([e](const Point& x) { return e.value(x); });
    for (int k = 0; k < 10; ++k) {
      const Point x = (Vec(3) << u(rng), u(rng) + 1.0, u(rng)).finished();
      const Jet j = e.jet(x);
      CHECK(j.v == doctest::Approx(e.value(x)));
      CHECK((j.g - fd.gradient(x)).norm() < 1e-7 * (1.0 + j.g.norm()));
      CHECK((j.h - fd.hessian(x)).norm() < 1e-4 * (1.0 + j.h.norm()));
      CHECK((j.h - j.h.transpose()).norm() < 1e-12);
    }
  }
}

TEST_CASE("field wrapper") {
  const ScalarField f = Expression::parse("t*y1", 2).field();
  CHECK(f.has_gradient());
  CHECK(f.has_hessian());
  const Point x = (Vec(2) << 2.0, 3.0).finished();
  CHECK(f(x) == 6.0);
  CHECK(f.hessian(x)(0, 1) == 1.0);
}

TEST_CASE("parse errors") {
  for (const char* bad : {"", "1 +", "(t", "t)", "foo(t)", "z1", "y3", "x4", "sqrt(t, t)", "2 $ 3", "norm()"})
    CHECK_THROWS_AS(Expression::parse(bad, 3), ConfigError);
}
