#pragma once

#include "ucp/hypothesis_checker.hpp"
#include "ucp/symbol_geometry.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ucp {

/// A unit covector on {p(x0, .) = 0, H_p psi1(x0, .) = 0}.
struct ConstraintSample {
  Covector xi;
  double res_p = 0.0;
  double res_hp = 0.0;
};

/// Unit covectors xi with p(x0, xi) = H_p psi(x0, xi) = 0 (no precondition
/// on psi). Empty when the set has no real points.
std::vector<ConstraintSample> null_tangent_covectors(const MetricField& q, const ScalarField& psi,
                                                     const Point& x0, int n, double eps_c);

/// The constraint set for psi1. Requires <Q dpsi1, dpsi1>(x0) > 0; throws
/// DegenerateConstraintSet when no covector converges. `n` is the number of
/// seeds; near-duplicates are merged, so finite sets come back with their
/// actual cardinality.
std::vector<ConstraintSample> constraint_samples(const MetricField& q, const ScalarField& psi1,
                                                 const Point& x0, int n, double eps_c,
                                                 double tol_pos = 1e-6);

/// min over the constraint set of |H_p psi0(x0, xi)|, refined locally from
/// the samples. Throws NondegeneracyViolation when not above tol_pos.
double compute_m0(const MetricField& q, const ScalarField& psi0, const ScalarField& psi1,
                  const Point& x0, const std::vector<ConstraintSample>& samples,
                  double tol_pos = 1e-6, double eps_c = 1e-12);

struct Lambda0 {
  double lambda0 = 0.0;
  double sphere_max = 0.0;      // max of H_p^2 psi1 over the whole sphere
  double constraint_max = 0.0;  // max over the constraint samples only
};

/// lambda0 = max_{|xi|=1} H_p^2 psi1(x0, xi) / (2 m0^2), dense scan of
/// n_dense points plus local refinement of the maximizer.
Lambda0 compute_lambda0(const MetricField& q, const ScalarField& psi1, const Point& x0, double m0,
                        int n_dense = 20000,
                        const std::vector<ConstraintSample>& samples = {});

enum class CertificateStatus { certified, failed, degenerate };
std::string to_string(CertificateStatus s);

struct SampleMargin {
  Covector xi;
  double hp2_psi1 = 0.0;
  double hp_psi0 = 0.0;
  double margin_key = 0.0;     // H_p^2 psi1 - 2 lambda (H_p psi0)^2
  double margin_direct = 0.0;  // H_p^2 (psi1 - lambda psi0^2) directly
};

struct Certificate {
  Point x0;
  double m0 = 0.0;
  double lambda0 = 0.0;
  double lambda0_constraint = 0.0;  // same ratio with the max over the constraint set
  double lambda_used = 0.0;
  double worst_margin = 0.0;
  int n_samples = 0;
  CertificateStatus status = CertificateStatus::failed;
  bool pseudo_convex_on_samples = false;  // worst_margin < -tol_pos regardless of lambda0
  bool finite_difference = false;
  std::string note;
  std::vector<SampleMargin> samples;
};

struct CertifyOptions {
  std::optional<double> lambda;  // defaults to 2 max(lambda0, 0) + 1
  int n = 2000;
  double eps_c = 1e-12;
  int n_dense = 20000;
  double tol_pos = 1e-6;
};

Certificate certify(const GeometrySpec& spec, const Point& x0, const CertifyOptions& opt = {});

/// Lower-level entry point taking psi0, psi1 directly (e.g. after a change of
/// coordinates).
Certificate certify_fields(const MetricField& q, const ScalarField& psi0, const ScalarField& psi1,
                           const Point& x0, const CertifyOptions& opt = {});

struct HormanderReport {
  bool pass = false;
  bool vacuous = false;  // no real covector satisfies the constraints
  double max_hp2 = 0.0;
  int n_samples = 0;
  std::optional<Covector> witness;
};

HormanderReport check_hormander(const MetricField& q, const ScalarField& psi, const Point& x0,
                                int n, double eps_c, double tol_pos = 1e-6);

struct CalderonReport {
  bool pass = false;
  double min_abs_hp = 0.0;
  int n_samples = 0;
  std::optional<Covector> witness;
};

CalderonReport check_calderon(const MetricField& q, const ScalarField& psi, const Point& x0, int n,
                              double tol_pos = 1e-6);

}  // namespace ucp
