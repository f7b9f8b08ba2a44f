#include <doctest.h>

#include "ucp/corner_lab.hpp"

#include <cmath>

using namespace ucp;

namespace {

ScalarField coordinate(int n, int axis) {
  Vec c = Vec::Zero(n);
  c[axis] = 1.0;
  return linear_field(c);
}

// Composite Simpson on [a, b] with m (even) intervals.
template <class F>
double simpson(F f, double a, double b, int m) {
  const double h = (b - a) / m;
  double s = f(a) + f(b);
  for (int i = 1; i < m; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

TestFunction centred(double c1, double c2, double r) {
  return TestFunction{(Vec(2) << c1, c2).finished(), Vec::Constant(2, r)};
}

}  // namespace

TEST_CASE("extension by zero") {
  const CornerField one = CornerField::make(constant_field(1.0), 2, 64);
  CHECK_FALSE(one.vanishes_on_face1);
  const GridFunction v = extend_by_zero(one);
  for (long i = 0; i < v.size(); ++i) {
    const Point y = v.node(i);
    CHECK(v[i] == ((y[0] >= -1e-15 && y[1] >= -1e-15) ? 1.0 : 0.0));
  }
  const CornerField uv = CornerField::make(product(coordinate(2, 0), coordinate(2, 1)), 2, 64);
  CHECK(uv.vanishes_on_face1);
  CHECK(uv.vanishes_on_face2);
  const GridFunction w = extend_by_zero(uv);
  for (long i = 0; i < w.size(); ++i) {
    const Point y = w.node(i);
    CHECK(w[i] == doctest::Approx((y[0] >= 0 && y[1] >= 0) ? y[0] * y[1] : 0.0));
  }
}

TEST_CASE("weak pairing examples") {
  const CornerField one = CornerField::make(constant_field(1.0), 2, 256);
  const GridFunction v = extend_by_zero(one);
  const TestFunction phi = centred(0.1, -0.05, 0.4);
  // d1 d2 (H x H) = delta x delta.
  CHECK(weak_pairing(v, {1, 1}, phi) == doctest::Approx(phi(Vec::Zero(2))).epsilon(1e-3));
  // alpha = 0 is the plain quadrature over the closed quadrant with H(0) = 1.
  const double plain = simpson([&](double a) {
    return simpson([&](double b) { return phi((Vec(2) << a, b).finished()); }, 0.0, 0.5, 2000);
  }, 0.0, 0.5, 2000);
  CHECK(weak_pairing(v, {0, 0}, phi) == doctest::Approx(plain).epsilon(1e-2));
  GridFunction zero(v.box(), v.cells());
  CHECK(weak_pairing(zero, {2, 0}, phi) == 0.0);
  CHECK_THROWS_AS(weak_pairing(v, {1, 0}, centred(0.8, 0.0, 0.3)), SupportError);
}

TEST_CASE("mixed derivative identity for U = y1 y2") {
  // d1 d2 U = 1, so the pairing is the integral of phi over the quadrant.
  const CornerField u = CornerField::make(product(coordinate(2, 0), coordinate(2, 1)), 2, 512);
  const GridFunction v = extend_by_zero(u);
  const TestFunction phi = centred(0.05, 0.1, 0.5);
  const double oracle = simpson([&](double a) {
    return simpson([&](double b) { return phi((Vec(2) << a, b).finished()); }, 0.0, 0.6, 1200);
  }, 0.0, 0.55, 1100);
  CHECK(weak_pairing(v, {1, 1}, phi) == doctest::Approx(oracle).epsilon(1e-5));
  CHECK(weak_pairing(v, {1, 1}, phi, true) == doctest::Approx(oracle).epsilon(1e-5));
}

TEST_CASE("weak identities converge at second order on the analytic corpus") {
  const auto tests = test_function_corpus(2, 20, 3);
  for (const auto& s : analytic_corner_corpus(2)) {
    const Lemma21Report coarse = lemma21_residuals(CornerField::make(s.u, 2, 128), tests);
    const Lemma21Report fine = verify_lemma21(CornerField::make(s.u, 2, 256), tests);
    for (const auto& [family, r] : fine.max_residual) {
      CHECK(r < 2.0 * fine.h * fine.h);
      CHECK(coarse.max_residual.at(family) / r > 2.5);
    }
  }
}

TEST_CASE("weak identities in three dimensions") {
  const auto tests = test_function_corpus(3, 6, 4, 0.1);
  const auto corpus = analytic_corner_corpus(3);
  REQUIRE(corpus.size() >= 2);
  const Lemma21Report a = verify_lemma21(CornerField::make(corpus[0].u, 3, 64), tests);
  const Lemma21Report b = verify_lemma21(CornerField::make(corpus[0].u, 3, 96), tests);
  CHECK(a.max_residual.size() == 4);
  for (const auto& [family, r] : b.max_residual) {
    CHECK(r < a.max_residual.at(family));
    CHECK(r < 1e-3);
  }
}

TEST_CASE("hypotheses of the extension lemma") {
  const auto tests = test_function_corpus(2, 5, 1);
  const CornerField one = CornerField::make(constant_field(1.0), 2, 128);
  CHECK_THROWS_AS(verify_lemma21(one, tests), HypothesisError);
  // Without the face condition an identity fails by an O(1) amount.
  const Lemma21Report r = lemma21_residuals(one, tests);
  CHECK(r.max_residual.at("222") > 1e-2);
  const CornerField zero = CornerField::make(constant_field(0.0), 2, 64);
  for (const auto& row : verify_lemma21(zero, tests).rows) {
    CHECK(row.lhs == 0.0);
    CHECK(row.rhs == 0.0);
  }
}

TEST_CASE("simple layer on a non-characteristic face") {
  const auto tests = test_function_corpus(2, 20, 8);
  const CornerField u = CornerField::make(product(coordinate(2, 0), coordinate(2, 1)), 2, 512);
  const LayerReport rep = detect_layer(u, tests);
  CHECK(rep.max_layer > 1e-3);
  for (const auto& row : rep.rows) {
    // S(phi) = integral over y2 > 0 of y2 phi(0, y2).
    const TestFunction& phi = tests[row.test_id];
    const double oracle = simpson([&](double b) { return b * phi((Vec(2) << 0.0, b).finished()); }, 0.0, 1.0, 4000);
    CHECK(row.surface == doctest::Approx(oracle).epsilon(2e-3).scale(1e-4));
    CHECK(std::abs(row.delta - row.surface) < 2.0 * 0.0039 * 0.0039);
  }
  // d1 U vanishes on the face for U = y1^2 y2.
  const CornerField u2 = CornerField::make(product(square(coordinate(2, 0)), coordinate(2, 1)), 2, 256);
  CHECK(detect_layer(u2, tests).max_layer < 1e-12);
  const CornerField zero = CornerField::make(constant_field(0.0), 2, 64);
  const LayerReport z = detect_layer(zero, tests);
  CHECK(z.max_layer == 0.0);
  CHECK(z.max_mismatch == 0.0);
}

TEST_CASE("differential inequality transfers with the same constant") {
  const auto corpus = analytic_corner_corpus(2);
  const CornerField u = CornerField::make(corpus[1].u, 2, 256);
  const BMatrixField b = [](const Point&) {
    Mat m(2, 2);
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
  };
  const double c = measure_c(u, b);
  CHECK(c > 0.0);
  const Lemma23Report rep = verify_lemma23(u, b, c, 2000);
  CHECK(rep.pass);
  CHECK(rep.violations == 0);
  CHECK(rep.off_quadrant > 0);
  CHECK(rep.worst_ratio <= 1.0 + 1e-12);
  CHECK(rep.max_fd_mismatch < 1e-2);
  CHECK_THROWS_AS(verify_lemma23(u, b, 0.5 * c, 100), HypothesisError);

  const BMatrixField bad = [](const Point&) { return Mat::Identity(2, 2); };
  CHECK_THROWS_AS(verify_lemma23(u, bad, c, 10), HypothesisError);

  const CornerField zero = CornerField::make(constant_field(0.0), 2, 64);
  CHECK(measure_c(zero, b) == 0.0);
  CHECK(verify_lemma23(zero, b, 0.0, 100).pass);
}

TEST_CASE("mollifier commutator") {
  const Box unit{Vec::Constant(2, -1.0), Vec::Constant(2, 1.0)};
  const TestFunction bump{Vec::Zero(2), Vec::Constant(2, 0.7)};
  const GridFunction kink =
      GridFunction::sample(unit, 256, [&](const Point& y) { return std::max(0.0, y[0]) * bump(y); });
  const GridFunction smooth =
      GridFunction::sample(unit, 256, [&](const Point& y) { return std::sin(2.0 * y[0]) * bump(y); });
  const std::vector<double> eps = {0.4, 0.2, 0.1, 0.05};

  for (double v : mollifier_commutator(constant_field(3.0), kink, eps)) CHECK(v < 1e-12);
  const auto k = mollifier_commutator(coordinate(2, 0), kink, eps);
  for (size_t i = 1; i < k.size(); ++i) CHECK(k[i] < k[i - 1]);
  // Smooth v: the commutator is O(eps).
  const auto s = mollifier_commutator(coordinate(2, 0), smooth, eps);
  for (size_t i = 0; i < s.size(); ++i) CHECK(s[i] / eps[i] < 0.5);
  CHECK_THROWS_AS(mollifier_commutator(coordinate(2, 0), kink, {0.02}), ResolutionError);
}

TEST_CASE("test function corpus stays inside the box") {
  for (int n : {2, 3}) {
    const auto tests = test_function_corpus(n, 20, 12);
    REQUIRE(tests.size() == 20);
    for (const auto& t : tests)
      for (int k = 0; k < n; ++k) {
        CHECK(t.center[k] - t.radius[k] >= -0.95 - 1e-12);
        CHECK(t.center[k] + t.radius[k] <= 0.95 + 1e-12);
      }
  }
}
