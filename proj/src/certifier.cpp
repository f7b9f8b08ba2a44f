#include "ucp/certifier.hpp"

#include "ucp/sphere_sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ucp {

namespace {

SphereConstraints tangent_null_set(const MetricField& q, const ScalarField& psi, const Point& x0) {
  const Mat m = q(x0);
  SphereConstraints c;
  c.quadratic = m;
  c.linear.push_back(2.0 * m * psi.gradient(x0));  // a . xi = H_p psi(x0, xi)
  return c;
}

std::vector<Vec> covectors(const std::vector<ConstraintSample>& s) {
  std::vector<Vec> out;
  out.reserve(s.size());
  for (const auto& c : s) out.push_back(c.xi);
  return out;
}

}  // namespace

std::vector<ConstraintSample> null_tangent_covectors(const MetricField& q, const ScalarField& psi,
                                                     const Point& x0, int n, double eps_c) {
  require(x0.size() == q.dim(), "constraint sampling: x0 dimension mismatch");
  require(eps_c > 0.0, "constraint sampling: eps_c must be positive");
  std::vector<ConstraintSample> out;
  if (n <= 0) return out;
  const SphereConstraints c = tangent_null_set(q, psi, x0);
  for (const auto& xi : sample_constraints(c, n, eps_c)) {
    const Vec r = c.residuals(xi);
    out.push_back({xi, std::abs(r[0]), std::abs(r[1])});
  }
  return out;
}

std::vector<ConstraintSample> constraint_samples(const MetricField& q, const ScalarField& psi1,
                                                 const Point& x0, int n, double eps_c,
                                                 double tol_pos) {
  const Vec d1 = psi1.gradient(x0);
  const double q11 = d1.dot(q(x0) * d1);
  require(q11 > tol_pos,
          "constraint_samples: {psi1 = 0} must be non-characteristic at x0 (<Q dpsi1, dpsi1> > 0)");
  if (n <= 0) return {};
  auto out = null_tangent_covectors(q, psi1, x0, n, eps_c);
  if (out.empty())
    throw DegenerateConstraintSet("no unit covector satisfies p = H_p psi1 = 0 at x0");
  return out;
}

double compute_m0(const MetricField& q, const ScalarField& psi0, const ScalarField& psi1,
                  const Point& x0, const std::vector<ConstraintSample>& samples, double tol_pos,
                  double eps_c) {
  require(!samples.empty(), "compute_m0: no constraint samples");
  const Vec b = 2.0 * q(x0) * psi0.gradient(x0);
  double m0 = std::numeric_limits<double>::infinity();
  for (const auto& s : samples) m0 = std::min(m0, std::abs(b.dot(s.xi)));
  const SphereConstraints c = tangent_null_set(q, psi1, x0);
  const FormExtremum ext =
      refine_form_extremum(c, b * b.transpose(), covectors(samples), /*maximize=*/false, eps_c);
  if (c.max_residual(ext.arg) <= eps_c) m0 = std::min(m0, std::sqrt(std::max(0.0, ext.value)));
  if (!(m0 > tol_pos))
    throw NondegeneracyViolation("m0 = " + std::to_string(m0) +
                                 " is not positive: H_p psi0 vanishes on the constraint set");
  return m0;
}

Lambda0 compute_lambda0(const MetricField& q, const ScalarField& psi1, const Point& x0, double m0,
                        int n_dense, const std::vector<ConstraintSample>& samples) {
  require(m0 > 0.0, "compute_lambda0: m0 must be positive");
  const Mat a = hp2_quadratic_form(q, psi1, x0);
  const auto seeds = sphere_seeds(static_cast<int>(x0.size()), std::max(n_dense, 1));
  Vec best = seeds.front();
  double best_val = -std::numeric_limits<double>::infinity();
  for (const auto& xi : seeds) {
    const double v = xi.dot(a * xi);
    if (v > best_val) {
      best_val = v;
      best = xi;
    }
  }
  SphereConstraints sphere;  // only |xi| = 1
  const FormExtremum ext = refine_form_extremum(sphere, a, {best}, /*maximize=*/true, 1e-14);

  Lambda0 out;
  // On the bare sphere the maximum is the top eigenvalue; the scan and the
  // refinement only guard against an asymmetric or ill-formed form.
  const double top = Eigen::SelfAdjointEigenSolver<Mat>(0.5 * (a + a.transpose())).eigenvalues().maxCoeff();
  out.sphere_max = std::max({best_val, ext.value, top});
  out.lambda0 = out.sphere_max / (2.0 * m0 * m0);
  out.constraint_max = -std::numeric_limits<double>::infinity();
  for (const auto& s : samples) out.constraint_max = std::max(out.constraint_max, hp2(q, psi1, {x0, s.xi}));
  if (samples.empty()) out.constraint_max = 0.0;
  return out;
}

std::string to_string(CertificateStatus s) {
  switch (s) {
    case CertificateStatus::certified: return "certified";
    case CertificateStatus::failed: return "failed";
    case CertificateStatus::degenerate: return "degenerate";
  }
  return "unknown";
}

Certificate certify_fields(const MetricField& q, const ScalarField& psi0, const ScalarField& psi1,
                           const Point& x0, const CertifyOptions& opt) {
  Certificate cert;
  cert.x0 = x0;
  const Vec d1 = psi1.gradient(x0);
  const double q11 = d1.dot(q(x0) * d1);
  if (!(q11 > opt.tol_pos)) {
    cert.status = CertificateStatus::degenerate;
    cert.note = "{psi1 = 0} is characteristic at x0; certification refused";
    return cert;
  }
  const auto samples = constraint_samples(q, psi1, x0, opt.n, opt.eps_c, opt.tol_pos);
  cert.m0 = compute_m0(q, psi0, psi1, x0, samples, opt.tol_pos, opt.eps_c);
  const Lambda0 l0 = compute_lambda0(q, psi1, x0, cert.m0, opt.n_dense, samples);
  cert.lambda0 = l0.lambda0;
  cert.lambda0_constraint = l0.constraint_max / (2.0 * cert.m0 * cert.m0);
  const double lambda = opt.lambda ? *opt.lambda : 2.0 * std::max(cert.lambda0, 0.0) + 1.0;
  cert.lambda_used = lambda;

  const ScalarField psi = combine(1.0, psi1, -lambda, square(psi0));
  cert.worst_margin = -std::numeric_limits<double>::infinity();
  for (const auto& s : samples) {
    const PhasePoint pp{x0, s.xi};
    SampleMargin sm;
    sm.xi = s.xi;
    const BracketValue h1 = hp2_eval(q, psi1, pp);
    sm.hp2_psi1 = h1.value;
    sm.hp_psi0 = hp(q, psi0, pp);
    sm.margin_key = sm.hp2_psi1 - 2.0 * lambda * sm.hp_psi0 * sm.hp_psi0;
    const BracketValue direct = hp2_eval(q, psi, pp);
    sm.margin_direct = direct.value;
    cert.finite_difference = cert.finite_difference || h1.finite_difference || direct.finite_difference;
    if (std::abs(sm.margin_key - sm.margin_direct) > 1e-6 * (1.0 + std::abs(sm.margin_key)))
      throw InternalInconsistency("margin via the key identity (" + std::to_string(sm.margin_key) +
                                  ") disagrees with direct H_p^2 (" +
                                  std::to_string(sm.margin_direct) + ")");
    cert.worst_margin = std::max(cert.worst_margin, sm.margin_direct);
    cert.samples.push_back(sm);
  }
  cert.n_samples = static_cast<int>(samples.size());
  cert.pseudo_convex_on_samples = cert.worst_margin < -opt.tol_pos;
  if (cert.pseudo_convex_on_samples && lambda > cert.lambda0) {
    cert.status = CertificateStatus::certified;
  } else {
    cert.status = CertificateStatus::failed;
    cert.note = cert.pseudo_convex_on_samples
                    ? "negative margin on the constraint set but lambda <= lambda0"
                    : "nonnegative margin on the constraint set";
  }
  return cert;
}

Certificate certify(const GeometrySpec& spec, const Point& x0, const CertifyOptions& opt) {
  spec.validate();
  require(x0.size() == spec.dim(), "certify: x0 dimension mismatch");
  const auto [psi0, psi1] = build_psi(spec);
  return certify_fields(spec.q, psi0, psi1, x0, opt);
}

HormanderReport check_hormander(const MetricField& q, const ScalarField& psi, const Point& x0,
                                int n, double eps_c, double tol_pos) {
  require(psi.gradient(x0).norm() > 0.0, "check_hormander: d psi(x0) must be nonzero");
  HormanderReport rep;
  const auto samples = null_tangent_covectors(q, psi, x0, n, eps_c);
  rep.n_samples = static_cast<int>(samples.size());
  if (samples.empty()) {
    rep.vacuous = true;
    rep.pass = true;
    return rep;
  }
  rep.max_hp2 = -std::numeric_limits<double>::infinity();
  for (const auto& s : samples) {
    const double v = hp2(q, psi, {x0, s.xi});
    if (v > rep.max_hp2) {
      rep.max_hp2 = v;
      rep.witness = s.xi;
    }
  }
  const SphereConstraints c = tangent_null_set(q, psi, x0);
  const FormExtremum ext =
      refine_form_extremum(c, hp2_quadratic_form(q, psi, x0), covectors(samples), true, eps_c);
  if (c.max_residual(ext.arg) <= eps_c && ext.value > rep.max_hp2) {
    rep.max_hp2 = ext.value;
    rep.witness = ext.arg;
  }
  rep.pass = rep.max_hp2 < -tol_pos;
  return rep;
}

CalderonReport check_calderon(const MetricField& q, const ScalarField& psi, const Point& x0, int n,
                              double tol_pos) {
  const Vec dpsi = psi.gradient(x0);
  require(dpsi.norm() > 0.0, "check_calderon: d psi(x0) must be nonzero");
  const Mat m = q(x0);
  const Vec b = 2.0 * m * dpsi;
  SphereConstraints cone;
  cone.quadratic = m;
  const auto samples = sample_constraints(cone, n, 1e-12);
  CalderonReport rep;
  rep.n_samples = static_cast<int>(samples.size());
  if (samples.empty()) {
    rep.pass = true;
    return rep;
  }
  rep.min_abs_hp = std::numeric_limits<double>::infinity();
  for (const auto& xi : samples) {
    const double v = std::abs(b.dot(xi));
    if (v < rep.min_abs_hp) {
      rep.min_abs_hp = v;
      rep.witness = xi;
    }
  }
  // A null covector with H_p psi = 0 exactly, when one is nearby.
  SphereConstraints tangent = cone;
  tangent.linear.push_back(b);
  if (auto xi = project_to_constraints(tangent, *rep.witness, 1e-12)) {
    rep.min_abs_hp = std::abs(b.dot(*xi));
    rep.witness = *xi;
  } else {
    const FormExtremum ext = refine_form_extremum(cone, b * b.transpose(), samples, false, 1e-12);
    const double v = std::sqrt(std::max(0.0, ext.value));
    if (cone.max_residual(ext.arg) <= 1e-12 && v < rep.min_abs_hp) {
      rep.min_abs_hp = v;
      rep.witness = ext.arg;
    }
  }
  rep.pass = rep.min_abs_hp > tol_pos;
  return rep;
}

}  // namespace ucp
