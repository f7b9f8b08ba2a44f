#include "ucp/tracer.hpp"

#include <Eigen/QR>

#include <cmath>
#include <limits>

namespace ucp {

namespace {

struct State {
  Vec x;
  Vec xi;
};

State rhs(const MetricField& q, const State& s) {
  const auto n = s.x.size();
  State d;
  d.x = 2.0 * q(s.x) * s.xi;
  d.xi.resize(n);
  for (Eigen::Index j = 0; j < n; ++j)
    d.xi[j] = -s.xi.dot(q.derivative(s.x, static_cast<int>(j)) * s.xi);
  return d;
}

State rk4_step(const MetricField& q, const State& s, double h) {
  const State k1 = rhs(q, s);
  const State k2 = rhs(q, {s.x + 0.5 * h * k1.x, s.xi + 0.5 * h * k1.xi});
  const State k3 = rhs(q, {s.x + 0.5 * h * k2.x, s.xi + 0.5 * h * k2.xi});
  const State k4 = rhs(q, {s.x + h * k3.x, s.xi + h * k3.xi});
  return {s.x + (h / 6.0) * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
          s.xi + (h / 6.0) * (k1.xi + 2.0 * k2.xi + 2.0 * k3.xi + k4.xi)};
}

// Steps with signed increment h; returns samples excluding the start.
std::vector<RaySample> march(const MetricField& q, const PhasePoint& start, double h, int n_steps,
                             const std::optional<Box>& domain, bool& truncated) {
  std::vector<RaySample> out;
  State s{start.x, start.xi};
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int i = 1; i <= n_steps; ++i) {
    s = rk4_step(q, s, h);
    if ((domain && !domain->contains(s.x)) || !s.x.allFinite() || !s.xi.allFinite()) {
      truncated = true;
      break;
    }
    out.push_back({i * h, s.x, s.xi, s.xi.dot(q(s.x) * s.xi), nan});
  }
  return out;
}

}  // namespace

double RayTrajectory::max_p_drift() const {
  if (samples.empty()) return 0.0;
  double p0 = 0.0;
  for (const auto& r : samples)
    if (r.s == 0.0) p0 = r.p;
  double d = 0.0;
  for (const auto& r : samples) d = std::max(d, std::abs(r.p - p0));
  return d;
}

RayTrajectory integrate(const MetricField& q, const PhasePoint& start, double ds, int n_steps,
                        const std::optional<Box>& domain) {
  require(ds > 0.0, "integrate: ds must be positive");
  require(n_steps >= 1, "integrate: n_steps must be at least 1");
  require(start.x.size() == q.dim() && start.xi.size() == q.dim(), "integrate: dimension mismatch");
  RayTrajectory traj;
  traj.step = ds;
  traj.samples.push_back({0.0, start.x, start.xi, eval_symbol(q, start),
                          std::numeric_limits<double>::quiet_NaN()});
  auto fwd = march(q, start, ds, n_steps, domain, traj.truncated);
  traj.samples.insert(traj.samples.end(), fwd.begin(), fwd.end());
  return traj;
}

RayTrajectory integrate_symmetric(const MetricField& q, const PhasePoint& start, double ds,
                                  int n_steps, const std::optional<Box>& domain) {
  require(ds > 0.0, "integrate_symmetric: ds must be positive");
  require(n_steps >= 1, "integrate_symmetric: n_steps must be at least 1");
  RayTrajectory traj;
  traj.step = ds;
  bool trunc_back = false, trunc_fwd = false;
  auto back = march(q, start, -ds, n_steps, domain, trunc_back);
  for (auto it = back.rbegin(); it != back.rend(); ++it) traj.samples.push_back(*it);
  traj.samples.push_back({0.0, start.x, start.xi, eval_symbol(q, start),
                          std::numeric_limits<double>::quiet_NaN()});
  auto fwd = march(q, start, ds, n_steps, domain, trunc_fwd);
  traj.samples.insert(traj.samples.end(), fwd.begin(), fwd.end());
  traj.truncated = trunc_back || trunc_fwd;
  return traj;
}

void with_psi(RayTrajectory& traj, const ScalarField& psi) {
  for (auto& r : traj.samples) r.psi = psi(r.x);
}

std::string to_string(ContactSide s) {
  switch (s) {
    case ContactSide::below: return "below";
    case ContactSide::above: return "above";
    case ContactSide::crossing: return "crossing";
  }
  return "unknown";
}

ContactReport contact(const MetricField& q, const RayTrajectory& traj, const ScalarField& psi,
                      const ContactOptions& opt) {
  const RaySample* launch = nullptr;
  for (const auto& r : traj.samples)
    if (r.s == 0.0) launch = &r;
  require(launch != nullptr, "contact: trajectory has no launch sample at s = 0");
  require(std::abs(psi(launch->x)) <= opt.tol_zero, "contact: launch point is not on {psi = 0}");

  std::vector<const RaySample*> window;
  for (const auto& r : traj.samples)
    if (std::abs(r.s) <= opt.s_fit) window.push_back(&r);
  if (window.size() < 8) throw FitError("contact: too few samples in the fit window");

  // Scaled abscissa keeps the normal equations well conditioned.
  const double scale = opt.s_fit;
  constexpr int degree = 5;
  Mat a(window.size(), degree + 1);
  Vec b(window.size());
  for (size_t i = 0; i < window.size(); ++i) {
    const double u = window[i]->s / scale;
    double pw = 1.0;
    for (int k = 0; k <= degree; ++k, pw *= u) a(i, k) = pw;
    b[i] = psi(window[i]->x);
  }
  Eigen::ColPivHouseholderQR<Mat> qr(a);
  if (qr.rank() < degree + 1) throw FitError("contact: rank-deficient fit");
  const Vec c = qr.solve(b);

  ContactReport rep;
  rep.n_fit = static_cast<int>(window.size());
  rep.fitted_c1 = c[1] / scale;
  rep.fitted_c2 = c[2] / (scale * scale);
  const PhasePoint pp{launch->x, launch->xi};
  rep.predicted_c1 = hp(q, psi, pp);
  rep.predicted_c2 = 0.5 * hp2(q, psi, pp);
  rep.relative_c2_error = std::abs(rep.fitted_c2 - rep.predicted_c2) /
                          std::max(std::abs(rep.predicted_c2), std::numeric_limits<double>::min());
  const double xdot = (2.0 * q(launch->x) * launch->xi).norm();
  rep.tol_tan = 1e-6 * psi.gradient(launch->x).norm() * xdot;
  rep.tangency = std::abs(rep.fitted_c1) <= rep.tol_tan;
  if (!rep.tangency)
    rep.side = ContactSide::crossing;
  else
    rep.side = rep.fitted_c2 < 0.0 ? ContactSide::below : ContactSide::above;
  return rep;
}

}  // namespace ucp
