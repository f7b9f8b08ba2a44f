#include <doctest.h>

#include "ucp/certifier.hpp"
#include "ucp/models.hpp"
#include "ucp/sphere_sampling.hpp"

#include <cmath>
#include <random>

using namespace ucp;

namespace {

// Flat-metric closed forms at x0 = (0, e1) for psi1 = |y| - 1, psi0 = t:
//   H_p psi0 = -2 xi0, H_p psi1 = 2 xi1,
//   H_p^2 psi1 = 4 (Q xi)^T Hess(psi1) (Q xi) = 4 |xi_perp|^2.
double oracle_hp2_psi1(const Vec& xi) {
  double s = 0.0;
  for (int k = 2; k < xi.size(); ++k) s += xi[k] * xi[k];
  return 4.0 * s;
}

}  // namespace

TEST_CASE("flat model constants") {
  for (int d : {2, 3}) {
    const ModelSpec m = ik_model(d);
    CertifyOptions opt;
    opt.lambda = 2.0;
    const Certificate c = certify(m.geometry, m.x0, opt);
    CHECK(c.status == CertificateStatus::certified);
    CHECK(c.m0 == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
    CHECK(c.lambda0 == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(c.worst_margin == doctest::Approx(-6.0).epsilon(1e-9));
    CHECK_FALSE(c.finite_difference);
    if (d == 2) CHECK(c.n_samples == 4);
  }
}

TEST_CASE("lambda0 agrees with a brute-force sphere scan") {
  const ModelSpec m = ik_model(3);
  const auto [psi0, psi1] = build_psi(m.geometry);
  const Lambda0 l = compute_lambda0(m.geometry.q, psi1, m.x0, std::sqrt(2.0));
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  double best = -1.0;
  for (int k = 0; k < 200000; ++k) {
    Vec xi(4);
    for (int i = 0; i < 4; ++i) xi[i] = g(rng);
    best = std::max(best, oracle_hp2_psi1(xi.normalized()));
  }
  CHECK(l.sphere_max == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(best == doctest::Approx(l.sphere_max).epsilon(1e-2));
  CHECK(best <= l.sphere_max + 1e-12);
}

TEST_CASE("constraint samples satisfy the constraints") {
  const ModelSpec m = ik_model(3);
  const auto [psi0, psi1] = build_psi(m.geometry);
  const auto s = constraint_samples(m.geometry.q, psi1, m.x0, 300, 1e-12);
  REQUIRE(s.size() > 50);
  for (const auto& c : s) {
    CHECK(c.xi.norm() == doctest::Approx(1.0));
    CHECK(std::abs(eval_symbol(m.geometry.q, {m.x0, c.xi})) < 1e-12);
    CHECK(std::abs(hp(m.geometry.q, psi1, {m.x0, c.xi})) < 1e-12);
    CHECK(std::abs(hp(m.geometry.q, psi0, {m.x0, c.xi})) == doctest::Approx(std::sqrt(2.0)));
  }
  CHECK(constraint_samples(m.geometry.q, psi1, m.x0, 0, 1e-12).empty());
}

TEST_CASE("key identity equals the direct bracket on every sample") {
  for (const ModelSpec& m : {ik_model(2), ik_model(3), conformal_model(2), conformal_model(3)}) {
    for (double lambda : {0.75, 2.0, 5.0}) {
      CertifyOptions opt;
      opt.lambda = lambda;
      opt.n = 300;
      const Certificate c = certify(m.geometry, m.x0, opt);
      REQUIRE_FALSE(c.samples.empty());
      const auto [psi0, psi1] = build_psi(m.geometry);
      const ScalarField psi = combine(1.0, psi1, -lambda, square(psi0));
      for (const auto& s : c.samples) {
        CHECK(s.margin_key == doctest::Approx(s.margin_direct).epsilon(1e-9));
        const double oracle = hp2_bracket_oracle(m.geometry.q, psi, {m.x0, s.xi});
        CHECK(s.margin_direct == doctest::Approx(oracle).epsilon(1e-5));
      }
    }
  }
}

TEST_CASE("status against lambda") {
  // Margin on ik2 is 2 - 4 lambda; certification also needs lambda > lambda0 = 1.
  const ModelSpec m = ik_model(2);
  auto run = [&](double lambda) {
    CertifyOptions opt;
    opt.lambda = lambda;
    return certify(m.geometry, m.x0, opt);
  };
  const Certificate low = run(0.25);
  CHECK(low.status == CertificateStatus::failed);
  CHECK(low.worst_margin == doctest::Approx(1.0));
  CHECK_FALSE(low.pseudo_convex_on_samples);
  const Certificate mid = run(0.75);
  CHECK(mid.status == CertificateStatus::failed);
  CHECK(mid.pseudo_convex_on_samples);
  CHECK(run(1.5).status == CertificateStatus::certified);
  // Default lambda is 2 lambda0 + 1.
  CHECK(certify(m.geometry, m.x0).lambda_used == doctest::Approx(3.0));
}

TEST_CASE("Hormander check agrees with certification outside the gap") {
  const ModelSpec m = ik_model(2);
  const auto [psi0, psi1] = build_psi(m.geometry);
  for (double lambda : {0.25, 0.4, 1.5, 2.0, 4.0}) {
    CertifyOptions opt;
    opt.lambda = lambda;
    const Certificate c = certify(m.geometry, m.x0, opt);
    const ScalarField psi = combine(1.0, psi1, -lambda, square(psi0));
    const HormanderReport h = check_hormander(m.geometry.q, psi, m.x0, 500, 1e-12);
    CHECK(h.pass == (c.status == CertificateStatus::certified));
    CHECK(h.max_hp2 == doctest::Approx(2.0 - 4.0 * lambda));
  }
}

TEST_CASE("degenerate and nondegeneracy failures") {
  const ModelSpec m = ik_model(2);
  const auto [psi0, psi1] = build_psi(m.geometry);
  // A characteristic psi1 is refused.
  const Certificate c = certify_fields(m.geometry.q, psi0, m.geometry.phi_plus, m.x0);
  CHECK(c.status == CertificateStatus::degenerate);
  // H_p y1 = 2 xi1 vanishes on the whole constraint set.
  const ScalarField y1 = linear_field((Vec(3) << 0.0, 1.0, 0.0).finished());
  const auto samples = constraint_samples(m.geometry.q, psi1, m.x0, 100, 1e-12);
  CHECK_THROWS_AS(compute_m0(m.geometry.q, y1, psi1, m.x0, samples), NondegeneracyViolation);
}

TEST_CASE("Calderon condition") {
  const ModelSpec m = ik_model(2);
  const auto [psi0, psi1] = build_psi(m.geometry);
  // Level sets of t are space-like: H_p t = -2 xi0 never vanishes on the null cone.
  const CalderonReport time = check_calderon(m.geometry.q, psi0, m.x0, 500);
  CHECK(time.pass);
  CHECK(time.min_abs_hp == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
  // psi1 has tangent null covectors.
  CHECK_FALSE(check_calderon(m.geometry.q, psi1, m.x0, 500).pass);
}
