#pragma once

#include "ucp/hypothesis_checker.hpp"

#include <map>
#include <string>
#include <vector>

namespace ucp {

struct KnownConstant {
  double value = 0.0;
  double tol = 0.0;
};

/// Ready-made geometry in coordinates x = (t, y1, ..., yd).
struct ModelSpec {
  std::string name;
  int d = 0;
  GeometrySpec geometry;
  Point x0;  // a point of the intersection of the two surfaces
  std::map<std::string, KnownConstant> known_constants;
  /// Name of the single hypothesis a negative control is built to fail.
  std::string designated_failure;
};

/// |y| as a field of x = (t, y) with analytic gradient and Hessian (y != 0).
ScalarField radial_field(int d);

/// Flat metric diag(-1, I_d), phi_pm = |y| - 1 -+ t. Requires d >= 2.
ModelSpec ik_model(int d);

/// Same surfaces under the conformal metric exp(2 sigma) diag(-1, I_d) with
/// sigma(x) = amplitude sin(t + y1 + 0.5 y2). Both surfaces stay
/// characteristic and the constants change.
ModelSpec conformal_model(int d, double amplitude = 0.2);

/// Chart z -> x with z1 = phi+, z2 = phi-, and gnomonic angles around the
/// direction of x0's spatial part for the remaining d - 1 coordinates.
/// Throws ContractViolation when x0 is off the intersection.
Chart flattening_chart(const ModelSpec& model, const Point& x0);

/// ctrl-a (fails bothcar), ctrl-b (fails transverse), ctrl-c (fails sign).
std::vector<ModelSpec> negative_controls();

/// "ik2", "ik3", "ctrl-a", "ctrl-b", "ctrl-c", "conformal2". Throws ConfigError otherwise.
ModelSpec model_by_name(const std::string& name);
std::vector<std::string> model_names();

}  // namespace ucp

#include "ucp/carleman_lab.hpp"

namespace ucp {

/// Everything the Carleman sweep needs for one model.
struct CarlemanSetup {
  MetricField q;
  LowerOrder lower;
  ScalarField psi;  // psi1 - lambda psi0^2 in the working coordinates
  Box box;
  std::string coordinates;  // "t,r" for the radial reduction, else "x"
};

/// For the flat light-cone models: the radial reduction in (t, r) with
/// P = -d_t^2 + d_r^2 + (d - 1)/r d_r. Otherwise the full coordinates with
/// the principal part only. The box is centred at x0 with the given half width.
CarlemanSetup carleman_setup(const ModelSpec& model, double lambda, double half_width = 0.2);

}  // namespace ucp
