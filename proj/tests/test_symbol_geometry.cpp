#include <doctest.h>

#include "ucp/symbol_geometry.hpp"

#include <cmath>
#include <random>

using namespace ucp;

namespace {

Mat minkowski(int n) {
  Mat q = Mat::Identity(n, n);
  q(0, 0) = -1.0;
  return q;
}

// Q(x) = exp(2 s(x)) diag(-1, 1, 1) + 0.1 x0 (e1 e2^T + e2 e1^T), analytic derivative.
MetricField curved() {
  auto s = [](const Point& x) { return 0.3 * std::sin(x[0] + 2.0 * x[1] - x[2]); };
  auto ds = [](const Point& x) {
    const double c = 0.3 * std::cos(x[0] + 2.0 * x[1] - x[2]);
    return (Vec(3) << c, 2.0 * c, -c).finished();
  };
  return MetricField(
      3,
      [=](const Point& x) {
        Mat m = std::exp(2.0 * s(x)) * minkowski(3);
        m(1, 2) = m(2, 1) = 0.1 * x[0];
        return m;
      },
      [=](const Point& x, int axis) {
        Mat m = 2.0 * ds(x)[axis] * std::exp(2.0 * s(x)) * minkowski(3);
        m(1, 2) = m(2, 1) = axis == 0 ? 0.1 : 0.0;
        return m;
      });
}

ScalarField curved_psi() {
  return ScalarField(
      [](const Point& x) { return x[1] + 0.5 * x[0] * x[2] - x[0] * x[0]; },
      [](const Point& x) { return (Vec(3) << 0.5 * x[2] - 2.0 * x[0], 1.0, 0.5 * x[0]).finished(); },
      [](const Point&) {
        Mat h = Mat::Zero(3, 3);
        h(0, 0) = -2.0;
        h(0, 2) = h(2, 0) = 0.5;
        return h;
      });
}

Mat random_lorentzian(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  Mat a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = g(rng);
  if (std::abs(a.determinant()) < 0.1) a += 2.0 * Mat::Identity(n, n);
  return a * minkowski(n) * a.transpose();
}

}  // namespace

TEST_CASE("symbol and signature") {
  const MetricField q = MetricField::constant(minkowski(3));
  const PhasePoint pp{Vec::Zero(3), (Vec(3) << 1.0, 1.0, 0.0).finished()};
  CHECK(eval_symbol(q, pp) == doctest::Approx(0.0));
  const Signature s = signature(minkowski(3));
  CHECK(s.n_plus == 2);
  CHECK(s.n_minus == 1);
  CHECK(s.lorentzian());
  Mat degenerate = minkowski(3);
  degenerate(2, 2) = 0.0;
  CHECK(signature(degenerate).n_zero == 1);
  CHECK_FALSE(signature(Mat::Identity(3, 3)).lorentzian());
}

TEST_CASE("normal form of random Lorentzian matrices") {
  std::mt19937_64 rng(3);
  for (int n = 2; n <= 5; ++n)
    for (int k = 0; k < 10; ++k) {
      const Mat m = random_lorentzian(rng, n);
      const Mat r = lorentz_normal_form(m);
      Mat target = Mat::Identity(n, n);
      target(n - 1, n - 1) = -1.0;
      CHECK((r.transpose() * m * r - target).norm() < 1e-9 * (1.0 + m.norm()));
    }
  CHECK_THROWS_AS(lorentz_normal_form(Mat::Identity(3, 3)), SignatureError);
}

TEST_CASE("first bracket") {
  const MetricField q = curved();
  const ScalarField psi = curved_psi();
  const PhasePoint pp{(Vec(3) << 0.2, -0.1, 0.4).finished(), (Vec(3) << 0.3, 1.0, -0.5).finished()};
  const double direct = 2.0 * (q(pp.x) * pp.xi).dot(psi.gradient(pp.x));
  CHECK(hp(q, psi, pp) == doctest::Approx(direct));
}

TEST_CASE("second bracket: constant metric closed form") {
  // With constant Q the flow is x' = 2 Q xi, so H_p^2 psi = 4 (Q xi)^T Hess psi (Q xi).
  const MetricField q = MetricField::constant(minkowski(3));
  const ScalarField psi = curved_psi();
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  for (int k = 0; k < 20; ++k) {
    const PhasePoint pp{(Vec(3) << g(rng), g(rng), g(rng)).finished(), (Vec(3) << g(rng), g(rng), g(rng)).finished()};
    const Vec v = minkowski(3) * pp.xi;
    CHECK(hp2(q, psi, pp) == doctest::Approx(4.0 * v.dot(psi.hessian(pp.x) * v)).epsilon(1e-12));
  }
}

TEST_CASE("second bracket matches nested Poisson brackets on a curved metric") {
  const MetricField q = curved();
  const ScalarField psi = curved_psi();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (int k = 0; k < 25; ++k) {
    const PhasePoint pp{(Vec(3) << u(rng), u(rng), u(rng)).finished(), (Vec(3) << u(rng), 1.0, u(rng)).finished()};
    const BracketValue b = hp2_eval(q, psi, pp);
    CHECK_FALSE(b.finite_difference);
    const double oracle = hp2_bracket_oracle(q, psi, pp);
    CHECK(b.value == doctest::Approx(oracle).epsilon(1e-6).scale(1.0));
  }
}

TEST_CASE("quadratic form of the second bracket") {
  const MetricField q = curved();
  const ScalarField psi = curved_psi();
  const Point x = (Vec(3) << 0.1, 0.2, -0.3).finished();
  const Mat a = hp2_quadratic_form(q, psi, x);
  CHECK(is_symmetric(a));
  std::mt19937_64 rng(6);
  std::normal_distribution<double> g;
  for (int k = 0; k < 10; ++k) {
    const Vec xi = (Vec(3) << g(rng), g(rng), g(rng)).finished();
    CHECK(xi.dot(a * xi) == doctest::Approx(hp2(q, psi, {x, xi})).epsilon(1e-10));
  }
}

TEST_CASE("pullback metric") {
  Mat a(3, 3);
  a << 1.0, 0.5, 0.0, 0.0, 2.0, 0.0, 0.0, 0.3, 1.0;
  const MetricField q = MetricField::constant(minkowski(3));
  const Chart c = Chart::linear(a);
  const Mat expected = a.inverse() * minkowski(3) * a.inverse().transpose();
  CHECK((pullback_metric(q, c, Vec::Zero(3)) - expected).norm() < 1e-12);
  CHECK(jacobian_condition(c, Vec::Zero(3)) < 10.0);

  Mat singular = a;
  singular.col(2).setZero();
  CHECK_THROWS_AS(pullback_metric(q, Chart::linear(singular), Vec::Zero(3)), ChartError);

  // The pulled-back symbol is the original one on transported covectors.
  const MetricField pq = pullback_field(q, c);
  const Vec eta = (Vec(3) << 0.3, -1.0, 0.7).finished();
  const Vec xi = a.inverse().transpose() * eta;
  CHECK(eval_symbol(pq, {Vec::Zero(3), eta}) == doctest::Approx(eval_symbol(q, {Vec::Zero(3), xi})));
}
