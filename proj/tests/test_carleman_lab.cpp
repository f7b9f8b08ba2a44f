#include <doctest.h>

#include "ucp/carleman_lab.hpp"
#include "ucp/models.hpp"

#include <cmath>

using namespace ucp;

namespace {

Mat flat2() {
  Mat q(2, 2);
  q << -1.0, 0.0, 0.0, 1.0;
  return q;
}

Box square_box(double c0, double c1, double half) {
  return Box{(Vec(2) << c0 - half, c1 - half).finished(), (Vec(2) << c0 + half, c1 + half).finished()};
}

}  // namespace

TEST_CASE("convexified weight") {
  const ModelSpec m = ik_model(2);
  const CarlemanSetup s = carleman_setup(m, 2.0);
  const WeightSpec w = build_weight(s.psi, 1.0);
  const Point x = (Vec(2) << 0.1, 1.05).finished();
  // psi = r - 1 - 2 t^2
  const double psi = 0.05 - 2.0 * 0.01;
  CHECK(w.phi(x) == doctest::Approx(std::exp(psi) - 1.0));
  CHECK((w.phi.gradient(x) - std::exp(psi) * s.psi.gradient(x)).norm() < 1e-14);
  // Same zero level set.
  const Point on = (Vec(2) << 0.1, 1.02).finished();
  CHECK(std::abs(w.phi(on)) < 1e-15);
  CHECK_THROWS_AS(build_weight(s.psi, 0.0), ContractViolation);
}

TEST_CASE("operator stencil") {
  const Box box = square_box(0.0, 0.0, 1.0);
  // w = 0
  GridFunction zero(box, 32);
  const GridFunction pz = apply_operator(MetricField::constant(flat2()), {}, zero);
  for (double v : pz.values()) CHECK(v == 0.0);

  // Exact on quadratics with a full constant metric.
  Mat q(2, 2);
  q << 1.0, 0.3, 0.3, 2.0;
  const GridFunction quad = GridFunction::sample(box, 16, [](const Point& x) {
    return x[0] * x[0] + 3.0 * x[0] * x[1] - x[1] * x[1];
  });
  const GridFunction pq = apply_operator(MetricField::constant(q), {}, quad);
  std::vector<int> idx;
  for (long i = 0; i < pq.size(); ++i) {
    pq.unflatten(i, idx);
    if (idx[0] == 0 || idx[1] == 0 || idx[0] == 16 || idx[1] == 16) continue;
    CHECK(pq[i] == doctest::Approx(2.0 * 1.0 + 2.0 * 0.3 * 3.0 + 2.0 * (-2.0)).epsilon(1e-10));
  }
}

TEST_CASE("operator consistency on a travelling wave times a bump") {
  // w = sin(pi (t + y)) b(t) b(y); the wave factor is annihilated by the box operator,
  // so P w = -(w_tt) + w_yy reduces to terms with derivatives on the bump.
  const TestFunction bump{Vec::Zero(2), Vec::Constant(2, 0.8)};
  auto exact = [&](const Point& x) {
    const double s = std::sin(M_PI * (x[0] + x[1])), c = std::cos(M_PI * (x[0] + x[1]));
    const double b0 = bump.factor(0, 0, x[0]), b1 = bump.factor(1, 0, x[1]);
    const double d0 = bump.factor(0, 1, x[0]), d1 = bump.factor(1, 1, x[1]);
    const double dd0 = bump.factor(0, 2, x[0]), dd1 = bump.factor(1, 2, x[1]);
    const double w_tt = -M_PI * M_PI * s * b0 * b1 + 2.0 * M_PI * c * d0 * b1 + s * dd0 * b1;
    const double w_yy = -M_PI * M_PI * s * b0 * b1 + 2.0 * M_PI * c * b0 * d1 + s * b0 * dd1;
    return -w_tt + w_yy;
  };
  auto error = [&](int cells) {
    const Box box = square_box(0.0, 0.0, 1.0);
    const GridFunction w = GridFunction::sample(box, cells, [&](const Point& x) {
      return std::sin(M_PI * (x[0] + x[1])) * bump(x);
    });
    const GridFunction pw = apply_operator(MetricField::constant(flat2()), {}, w);
    double e = 0.0;
    for (long i = 0; i < pw.size(); ++i) e = std::max(e, std::abs(pw[i] - exact(pw.node(i))));
    return e;
  };
  const double e1 = error(128), e2 = error(256);
  CHECK(e2 < 0.05);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("ratio properties") {
  const ModelSpec m = ik_model(2);
  const CarlemanSetup s = carleman_setup(m, 2.0);
  const WeightSpec weight = build_weight(s.psi, 1.0);
  const auto corpus = bump_corpus(s.box, 128, 3, 5);
  const GridFunction& w = corpus[0];

  const CarlemanValue v = carleman_ratio(s.q, s.lower, weight, w, 8.0);
  CHECK(v.ratio > 0.0);
  CHECK(std::isfinite(v.ratio));
  CHECK(v.ratio == doctest::Approx(v.lhs / (v.rhs1 + v.rhs2)));

  GridFunction w2 = w;
  for (auto& x : w2.values()) x *= -2.0;
  const CarlemanValue v2 = carleman_ratio(s.q, s.lower, weight, w2, 8.0);
  CHECK(v2.lhs == doctest::Approx(2.0 * v.lhs).epsilon(1e-13));
  CHECK(v2.rhs1 == doctest::Approx(2.0 * v.rhs1).epsilon(1e-13));
  CHECK(v2.rhs2 == doctest::Approx(2.0 * v.rhs2).epsilon(1e-13));
  CHECK(v2.ratio == doctest::Approx(v.ratio).epsilon(1e-13));

  // Adding a constant to phi changes nothing after the shift.
  WeightSpec shifted = weight;
  shifted.phi = combine(1.0, weight.phi, 3.0, constant_field(1.0));
  CHECK(carleman_ratio(s.q, s.lower, shifted, w, 8.0).ratio == doctest::Approx(v.ratio).epsilon(1e-10));

  GridFunction zero(w.box(), w.cells());
  const CarlemanValue z = carleman_ratio(s.q, s.lower, weight, zero, 8.0);
  CHECK(z.empty);
  CHECK(std::isnan(z.ratio));

  CHECK_THROWS_AS(carleman_ratio(s.q, s.lower, weight, w, 1e7), RangeError);
  CHECK_THROWS_AS(carleman_ratio(s.q, s.lower, weight, w, 0.0), ContractViolation);
}

TEST_CASE("lambda sweep") {
  const ModelSpec m = ik_model(2);
  const CarlemanSetup s = carleman_setup(m, 2.0);
  const WeightSpec weight = build_weight(s.psi, 1.0);
  const auto corpus = bump_corpus(s.box, 96, 6, 11);
  const std::vector<double> lambdas = {1.0, 2.0, 4.0, 8.0, 16.0};
  const CarlemanReport rep = lambda_sweep(s.q, s.lower, weight, corpus, lambdas);
  CHECK(rep.rows.size() == corpus.size() * lambdas.size());
  for (double r : rep.r_min) CHECK(r > 0.0);
  // The explicit lambda powers: rhs2 / rhs1 grows like lambda times a ratio of norms.
  for (const auto& row : rep.rows) {
    const auto& v = row.value;
    CHECK(v.rhs2 / v.rhs1 == doctest::Approx(row.lambda * v.weighted_w / v.weighted_grad).epsilon(1e-12));
    CHECK(v.rhs1 == doctest::Approx(std::sqrt(row.lambda) * v.weighted_grad).epsilon(1e-14));
  }
  CHECK_THROWS_AS(lambda_sweep(s.q, s.lower, weight, corpus, {2.0, 1.0}), ContractViolation);
  CHECK_THROWS_AS(lambda_sweep(s.q, s.lower, weight, {}, lambdas), ContractViolation);
}

TEST_CASE("bump corpus") {
  const Box box = square_box(0.0, 1.0, 0.2);
  const auto corpus = bump_corpus(box, 64, 10, 3);
  REQUIRE(corpus.size() == 10);
  std::vector<int> idx;
  for (const auto& w : corpus) {
    double inner = 0.0;
    for (long i = 0; i < w.size(); ++i) {
      w.unflatten(i, idx);
      const bool edge = idx[0] < 13 || idx[1] < 13 || idx[0] > 51 || idx[1] > 51;
      if (edge) CHECK(w[i] == 0.0);
      inner = std::max(inner, std::abs(w[i]));
    }
    CHECK(inner > 0.0);
  }
  const auto again = bump_corpus(box, 64, 10, 3);
  CHECK(again[4].values() == corpus[4].values());
}

TEST_CASE("three-dimensional smoke run") {
  const ModelSpec m = ik_model(2);
  CarlemanSetup s;
  s.q = m.geometry.q;
  const auto [psi0, psi1] = build_psi(m.geometry);
  s.psi = combine(1.0, psi1, -2.0, square(psi0));
  s.box = Box{m.x0.array() - 0.2, m.x0.array() + 0.2};
  const auto corpus = bump_corpus(s.box, 32, 2, 1);
  const CarlemanReport rep = lambda_sweep(s.q, {}, build_weight(s.psi, 1.0), corpus, {1.0, 4.0});
  for (double r : rep.r_min) CHECK(r > 0.0);
}
