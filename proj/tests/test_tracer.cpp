#include <doctest.h>

#include "ucp/certifier.hpp"
#include "ucp/models.hpp"
#include "ucp/tracer.hpp"

#include <cmath>

using namespace ucp;

TEST_CASE("flat rays are straight lines") {
  const ModelSpec m = ik_model(2);
  const Vec xi = (Vec(3) << 0.3, -0.2, 0.7).finished();
  const RayTrajectory tr = integrate(m.geometry.q, {m.x0, xi}, 1e-2, 50);
  REQUIRE(tr.samples.size() == 51);
  const Vec v = 2.0 * m.geometry.q(m.x0) * xi;
  for (const auto& s : tr.samples) {
    CHECK((s.x - (m.x0 + s.s * v)).norm() < 1e-13);
    CHECK((s.xi - xi).norm() < 1e-13);
    CHECK(std::isnan(s.psi));
  }
}

TEST_CASE("the symbol is conserved on a curved metric") {
  const ModelSpec m = conformal_model(2);
  const Vec xi = (Vec(3) << 1.0, 1.0, 0.3).finished();
  const RayTrajectory tr = integrate(m.geometry.q, {m.x0, xi}, 1e-3, 300);
  CHECK(tr.max_p_drift() < 1e-10);
}

TEST_CASE("RK4 converges at fourth order") {
  const ModelSpec m = conformal_model(2);
  const PhasePoint start{m.x0, (Vec(3) << 1.0, 0.4, 0.8).finished()};
  const double length = 0.2;
  auto end_point = [&](int steps) {
    return integrate(m.geometry.q, start, length / steps, steps).samples.back().x;
  };
  const Vec ref = end_point(2560);
  const double e1 = (end_point(20) - ref).norm(), e2 = (end_point(40) - ref).norm();
  CHECK(std::log2(e1 / e2) == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("symmetric integration and truncation") {
  const ModelSpec m = ik_model(2);
  const Vec xi = (Vec(3) << 1.0, 0.0, 1.0).finished();
  const RayTrajectory tr = integrate_symmetric(m.geometry.q, {m.x0, xi}, 1e-3, 10);
  REQUIRE(tr.samples.size() == 21);
  CHECK(tr.samples.front().s == doctest::Approx(-1e-2));
  CHECK(tr.samples.back().s == doctest::Approx(1e-2));
  for (size_t i = 1; i < tr.samples.size(); ++i) CHECK(tr.samples[i].s > tr.samples[i - 1].s);
  // x0' = -2 xi0 leaves |t| <= 0.5 after s = 0.25.
  const RayTrajectory cut = integrate(m.geometry.q, {m.x0, xi}, 1e-2, 100, m.geometry.box);
  CHECK(cut.truncated);
  CHECK(cut.samples.size() < 101);
}

TEST_CASE("contact order along tangent null rays") {
  const ModelSpec m = ik_model(2);
  const auto [psi0, psi1] = build_psi(m.geometry);
  const ScalarField psi = combine(1.0, psi1, -2.0, square(psi0));
  CertifyOptions opt;
  opt.lambda = 2.0;
  const Certificate c = certify(m.geometry, m.x0, opt);
  for (const auto& s : c.samples) {
    RayTrajectory tr = integrate_symmetric(m.geometry.q, {m.x0, s.xi}, 1e-3, 100);
    // 1/2 H_p^2 psi = (2 - 4 lambda)/2 = -3 for lambda = 2, and +1 for psi1.
    const ContactReport r = contact(m.geometry.q, tr, psi);
    CHECK(r.tangency);
    CHECK(r.side == ContactSide::below);
    CHECK(r.fitted_c2 == doctest::Approx(-3.0).epsilon(1e-4));
    CHECK(r.predicted_c2 == doctest::Approx(-3.0).epsilon(1e-10));
    const ContactReport r1 = contact(m.geometry.q, tr, psi1);
    CHECK(r1.side == ContactSide::above);
    CHECK(r1.fitted_c2 == doctest::Approx(1.0).epsilon(1e-4));
    with_psi(tr, psi);
    CHECK(std::abs(tr.samples[100].psi) < 1e-14);
  }
}

TEST_CASE("transversal rays cross") {
  const ModelSpec m = ik_model(2);
  const auto [psi0, psi1] = build_psi(m.geometry);
  const Vec xi = (Vec(3) << 1.0, 1.0, 0.0).finished() / std::sqrt(2.0);
  const RayTrajectory tr = integrate_symmetric(m.geometry.q, {m.x0, xi}, 1e-3, 100);
  const ContactReport r = contact(m.geometry.q, tr, psi1);
  CHECK_FALSE(r.tangency);
  CHECK(r.side == ContactSide::crossing);
  CHECK(r.fitted_c1 == doctest::Approx(r.predicted_c1).epsilon(1e-8));
}

TEST_CASE("contact errors") {
  const ModelSpec m = ik_model(2);
  const auto [psi0, psi1] = build_psi(m.geometry);
  const Vec xi = (Vec(3) << 1.0, 0.0, 1.0).finished();
  const RayTrajectory shortray = integrate_symmetric(m.geometry.q, {m.x0, xi}, 1e-2, 2);
  CHECK_THROWS_AS(contact(m.geometry.q, shortray, psi1), FitError);
  const RayTrajectory off = integrate(m.geometry.q, {m.x0 * 1.1, xi}, 1e-3, 10);
  CHECK_THROWS_AS(contact(m.geometry.q, off, psi1), ContractViolation);
}
