#include "ucp/sphere_sampling.hpp"

#include <Eigen/QR>

#include <cmath>
#include <numbers>

namespace ucp {

std::vector<Vec> sphere_seeds(int n, int count) {
  require(n >= 2, "sphere_seeds: dimension must be at least 2");
  std::vector<Vec> out;
  if (count <= 0) return out;
  out.reserve(count);
  if (n == 2) {
    for (int i = 0; i < count; ++i) {
      const double th = 2.0 * std::numbers::pi * (i + 0.5) / count;
      Vec v(2);
      v << std::cos(th), std::sin(th);
      out.push_back(v);
    }
    return out;
  }
  if (n == 3) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
      const double z = 1.0 - 2.0 * (i + 0.5) / count;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double th = golden * i;
      Vec v(3);
      v << r * std::cos(th), r * std::sin(th), z;
      out.push_back(v);
    }
    return out;
  }
  // Additive recurrence with the generalized golden ratio of dimension m,
  // mapped to Gaussians pairwise by Box-Muller, then normalized.
  const int m = 2 * ((n + 1) / 2);
  double g = 2.0;
  for (int it = 0; it < 64; ++it) g = std::pow(1.0 + g, 1.0 / (m + 1));
  Vec alpha(m);
  for (int k = 0; k < m; ++k) alpha[k] = std::fmod(std::pow(1.0 / g, k + 1), 1.0);
  for (int i = 0; i < count; ++i) {
    Vec u(m), gauss(m);
    for (int k = 0; k < m; ++k) u[k] = std::fmod(0.5 + alpha[k] * (i + 1), 1.0);
    for (int k = 0; k < m; k += 2) {
      const double r = std::sqrt(-2.0 * std::log(std::max(u[k], 1e-300)));
      gauss[k] = r * std::cos(2.0 * std::numbers::pi * u[k + 1]);
      gauss[k + 1] = r * std::sin(2.0 * std::numbers::pi * u[k + 1]);
    }
    Vec v = gauss.head(n);
    const double nv = v.norm();
    if (nv < 1e-12) continue;
    out.push_back(v / nv);
  }
  return out;
}

//--------------------------------------------------------------------------------------------------

int SphereConstraints::dim() const {
  if (quadratic) return static_cast<int>(quadratic->rows());
  require(!linear.empty(), "SphereConstraints: no constraints to infer the dimension from");
  return static_cast<int>(linear.front().size());
}

Vec SphereConstraints::residuals(const Vec& xi) const {
  const int rows = (quadratic ? 1 : 0) + static_cast<int>(linear.size()) + 1;
  Vec r(rows);
  int k = 0;
  if (quadratic) r[k++] = xi.dot(*quadratic * xi);
  for (const auto& a : linear) r[k++] = a.dot(xi);
  r[k] = xi.squaredNorm() - 1.0;
  return r;
}

double SphereConstraints::max_residual(const Vec& xi) const {
  const Vec r = residuals(xi);
  return r.head(r.size() - 1).cwiseAbs().maxCoeff();
}

Mat SphereConstraints::jacobian(const Vec& xi) const {
  const int rows = (quadratic ? 1 : 0) + static_cast<int>(linear.size()) + 1;
  Mat j(rows, xi.size());
  int k = 0;
  if (quadratic) j.row(k++) = 2.0 * (*quadratic * xi).transpose();
  for (const auto& a : linear) j.row(k++) = a.transpose();
  j.row(k) = 2.0 * xi.transpose();
  return j;
}

std::optional<Vec> project_to_constraints(const SphereConstraints& c, Vec xi, double tol,
                                          int max_iter) {
  if (xi.norm() < 1e-14) return std::nullopt;
  xi.normalize();
  auto merit = [&](const Vec& v) { return c.residuals(v).squaredNorm(); };
  for (int it = 0; it <= max_iter; ++it) {
    if (c.max_residual(xi) <= tol) return xi;
    if (it == max_iter) break;
    const Vec r = c.residuals(xi);
    Eigen::CompleteOrthogonalDecomposition<Mat> cod(c.jacobian(xi));
    cod.setThreshold(1e-12);
    const Vec step = cod.solve(r);
    const double m0 = merit(xi);
    double t = 1.0;
    Vec next = xi - step;
    while (t > 1e-4) {
      next = xi - t * step;
      if (next.norm() > 1e-14) {
        next.normalize();
        if (merit(next) < m0) break;
      }
      t *= 0.5;
    }
    if (!(next.norm() > 0.5)) return std::nullopt;
    xi = next;
  }
  return std::nullopt;
}

std::vector<Vec> sample_constraints(const SphereConstraints& c, int n_seeds, double tol,
                                    double merge_angle) {
  std::vector<Vec> out;
  if (n_seeds <= 0) return out;
  const double cos_merge = std::cos(merge_angle);
  for (const auto& seed : sphere_seeds(c.dim(), n_seeds)) {
    auto xi = project_to_constraints(c, seed, tol);
    if (!xi) continue;
    bool duplicate = false;
    for (const auto& e : out)
      if (e.dot(*xi) >= cos_merge) {
        duplicate = true;
        break;
      }
    if (!duplicate) out.push_back(*xi);
  }
  return out;
}

FormExtremum refine_form_extremum(const SphereConstraints& c, const Mat& a,
                                  const std::vector<Vec>& starts, bool maximize, double tol) {
  require(!starts.empty(), "refine_form_extremum: no starting points");
  const double sgn = maximize ? 1.0 : -1.0;
  auto objective = [&](const Vec& v) { return sgn * v.dot(a * v); };
  Vec best = starts.front();
  for (const auto& s : starts)
    if (objective(s) > objective(best)) best = s;

  Vec xi = best;
  double f = objective(xi);
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  for (int it = 0; it < 500; ++it) {
    const Mat jac = c.jacobian(xi);
    Eigen::CompleteOrthogonalDecomposition<Mat> cod(jac);
    cod.setThreshold(1e-12);
    const Mat proj = Mat::Identity(xi.size(), xi.size()) - cod.pseudoInverse() * jac;
    const Vec g = proj * (2.0 * sgn * (a * xi));
    if (g.norm() <= 1e-13 * scale) break;
    double t = 1.0 / scale;
    bool moved = false;
    while (t > 1e-14 / scale) {
      auto cand = project_to_constraints(c, xi + t * g, tol);
      if (cand) {
        const double fc = objective(*cand);
        if (fc > f + 1e-4 * t * g.squaredNorm()) {
          xi = *cand;
          f = fc;
          moved = true;
          break;
        }
      }
      t *= 0.5;
    }
    if (!moved) break;
  }
  return {sgn * f, xi};
}

}  // namespace ucp
