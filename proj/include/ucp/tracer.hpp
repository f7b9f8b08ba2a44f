#pragma once

#include "ucp/symbol_geometry.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ucp {

struct RaySample {
  double s = 0.0;
  Point x;
  Covector xi;
  double p = 0.0;
  double psi = 0.0;  // filled by contact() / with_psi(); NaN otherwise
};

struct RayTrajectory {
  std::vector<RaySample> samples;  // strictly increasing in s
  double step = 0.0;
  bool truncated = false;  // left the domain box before n_steps

  double max_p_drift() const;
};

/// Classical RK4 for x' = dp/dxi = 2 Q xi, xi' = -dp/dx = -(<d_j Q xi, xi>)_j.
RayTrajectory integrate(const MetricField& q, const PhasePoint& start, double ds, int n_steps,
                        const std::optional<Box>& domain = std::nullopt);

/// Integrates n_steps forward and n_steps backward from start; s runs over
/// [-n_steps ds, n_steps ds].
RayTrajectory integrate_symmetric(const MetricField& q, const PhasePoint& start, double ds,
                                  int n_steps, const std::optional<Box>& domain = std::nullopt);

/// Fills the psi column of a trajectory.
void with_psi(RayTrajectory& traj, const ScalarField& psi);

enum class ContactSide { below, above, crossing };
std::string to_string(ContactSide s);

struct ContactReport {
  bool tangency = false;
  double fitted_c1 = 0.0;
  double fitted_c2 = 0.0;       // psi(gamma(s)) ~ c0 + c1 s + c2 s^2 + ... + c5 s^5
  double predicted_c1 = 0.0;    // H_p psi at launch
  double predicted_c2 = 0.0;    // 1/2 H_p^2 psi at launch
  double relative_c2_error = 0.0;
  double tol_tan = 0.0;
  ContactSide side = ContactSide::crossing;
  int n_fit = 0;
};

struct ContactOptions {
  double s_fit = 0.05;
  double tol_zero = 1e-8;
};

/// Least-squares quintic fit of psi along the ray over |s| <= s_fit.
ContactReport contact(const MetricField& q, const RayTrajectory& traj, const ScalarField& psi,
                      const ContactOptions& opt = {});

}  // namespace ucp
