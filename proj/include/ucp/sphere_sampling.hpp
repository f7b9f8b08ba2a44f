#pragma once

#include "ucp/types.hpp"

#include <optional>
#include <vector>

namespace ucp {

/// Deterministic, roughly uniform seeds on the unit sphere S^{n-1}: a
/// Fibonacci lattice for n = 3, Box-Muller over an additive-recurrence
/// (Kronecker) sequence otherwise.
std::vector<Vec> sphere_seeds(int n, int count);

/// Algebraic subset of the unit sphere
///   { xi : |xi| = 1, xi^T M xi = 0 (if quadratic), a_k . xi = 0 }.
struct SphereConstraints {
  std::optional<Mat> quadratic;
  std::vector<Vec> linear;

  int dim() const;
  /// Residual vector (quadratic, linear..., sphere).
  Vec residuals(const Vec& xi) const;
  /// Largest constraint residual, excluding the sphere equation.
  double max_residual(const Vec& xi) const;
  Mat jacobian(const Vec& xi) const;
};

/// Damped minimum-norm Newton projection onto the constraint set. Returns
/// nothing when max_iter steps do not bring every residual below tol.
std::optional<Vec> project_to_constraints(const SphereConstraints& c, Vec xi, double tol,
                                          int max_iter = 30);

/// Seeds, Newton refinement and merging of near duplicates (angular
/// distance below merge_angle radians).
std::vector<Vec> sample_constraints(const SphereConstraints& c, int n_seeds, double tol,
                                    double merge_angle = 1e-3);

struct FormExtremum {
  double value = 0.0;
  Vec arg;
};

/// Local extremum of xi^T A xi on the constraint set by projected gradient
/// steps with Newton retraction, started from the best of `starts`.
FormExtremum refine_form_extremum(const SphereConstraints& c, const Mat& a,
                                  const std::vector<Vec>& starts, bool maximize, double tol);

}  // namespace ucp
