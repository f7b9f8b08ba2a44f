#pragma once

#include "ucp/fields.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ucp {

struct Tolerances {
  double zero = 1e-10;  // surface membership
  double chr = 1e-8;    // |<Q n, n>| for unit conormals n
  double pos = 1e-6;    // strict sign checks
  double id = 1e-8;     // algebraic identities
};

/// Metric, the two hypersurface functions and the region where they are
/// examined.
struct GeometrySpec {
  MetricField q;
  ScalarField phi_plus;
  ScalarField phi_minus;
  Box box;
  int n_surface_samples = 64;
  Tolerances tol;
  int grid_resolution = 0;  // nodes per axis of the seed scan; 0 picks by dimension

  int dim() const { return q.dim(); }
  void validate() const;
};

enum class SurfaceKind { plus, minus, intersection };

struct SurfaceSampling {
  std::vector<Point> points;
  int candidates = 0;  // converged Newton projections before thinning
  int discarded = 0;   // Newton failures or projections leaving the box
  int shortfall = 0;   // requested minus returned, when positive
};

SurfaceSampling sample_surface(const GeometrySpec& spec, SurfaceKind which);

struct AssumptionResult {
  bool pass = false;
  double margin = 0.0;
  std::optional<Point> witness;  // worst-case point
  int n_points = 0;
  std::string detail;
  std::vector<double> values;  // per-sample values when meaningful
};

/// Assumption name -> result, for "manifold", "transverse", "bothcar", "sign".
struct HypothesisReport {
  std::map<std::string, AssumptionResult> checks;
  bool all_pass() const;
  std::vector<std::string> failed() const;
};

HypothesisReport check_assumptions(const GeometrySpec& spec);

/// (psi0, psi1) with psi1 = (phi+ + phi-)/2 and psi0 = (phi- - phi+)/2.
std::pair<ScalarField, ScalarField> build_psi(const GeometrySpec& spec);

struct Lemma26Report {
  bool pass = false;
  double min_q11 = 0.0;      // min <Q dpsi1, dpsi1>
  double max_q00 = 0.0;      // max <Q dpsi0, dpsi0>
  double max_sum = 0.0;      // max |<Q dpsi1,dpsi1> + <Q dpsi0,dpsi0>|
  double max_cross = 0.0;    // max |<Q dpsi1, dpsi0>|
  std::optional<Point> witness;
  int n_points = 0;
};

Lemma26Report verify_lemma26(const GeometrySpec& spec);

struct InclusionReport {
  bool holds = false;
  double worst_margin = 0.0;  // min of psi1 - lambda psi0^2 over samples
  int n_samples = 0;
  bool radius_exceeds_bound = false;  // radius > 1/lambda
  std::optional<Point> witness;
};

InclusionReport verify_inclusion(const GeometrySpec& spec, double lambda, double radius,
                                 int n_samples, unsigned long long seed = 7);

}  // namespace ucp
