#pragma once

#include "ucp/fields.hpp"

namespace ucp {

/// (x, xi): a base point and a covector over it.
struct PhasePoint {
  Point x;
  Covector xi;
};

/// p(x, xi) = <Q(x) xi, xi>.
double eval_symbol(const MetricField& q, const PhasePoint& pp);

struct Signature {
  int n_plus = 0;
  int n_minus = 0;
  int n_zero = 0;
  double tol = 0.0;  // eigenvalue threshold actually used

  bool lorentzian() const { return n_minus == 1 && n_zero == 0 && n_plus >= 1; }
  friend bool operator==(const Signature& a, const Signature& b) {
    return a.n_plus == b.n_plus && a.n_minus == b.n_minus && a.n_zero == b.n_zero;
  }
};

/// Eigenvalue sign counts with threshold 1e-10 * max |eigenvalue|.
Signature signature(const Mat& m);

/// R with R^T M R = diag(1, ..., 1, -1). Throws SignatureError unless M has
/// signature (n-1, 1).
Mat lorentz_normal_form(const Mat& m);

/// H_p psi (x, xi) = 2 <Q(x) xi, d psi(x)>.
double hp(const MetricField& q, const ScalarField& psi, const PhasePoint& pp);

struct BracketValue {
  double value = 0.0;
  bool finite_difference = false;  // a derivative supplier was missing
};

/// H_p^2 psi assembled from Q, dQ, d psi and the Hessian of psi:
///   1/2 H_p^2 psi = sum_j dp/dxi_j (<d_j Q xi, d psi> + <Q xi, d(d_j psi)>)
///                   - <d_x Q xi, xi> . Q d psi
BracketValue hp2_eval(const MetricField& q, const ScalarField& psi, const PhasePoint& pp);
inline double hp2(const MetricField& q, const ScalarField& psi, const PhasePoint& pp) {
  return hp2_eval(q, psi, pp).value;
}

/// Independent route to H_p^2 psi: the nested Poisson bracket {p, {p, psi}}
/// with every derivative taken by fourth-order central differences of p and
/// psi values.
double hp2_bracket_oracle(const MetricField& q, const ScalarField& psi, const PhasePoint& pp);

/// Quadratic form A with H_p^2 psi(x, xi) = xi^T A xi, recovered by
/// polarization from hp2 evaluations.
Mat hp2_quadratic_form(const MetricField& q, const ScalarField& psi, const Point& x);

/// Q_kappa(y) = kappa'(y)^{-1} Q(kappa(y)) kappa'(y)^{-T}.
Mat pullback_metric(const MetricField& q, const Chart& chart, const Point& y);

/// The pulled-back metric as a field (derivatives by finite differences).
MetricField pullback_field(const MetricField& q, const Chart& chart);

/// Condition number of the chart jacobian at y (infinity when singular).
double jacobian_condition(const Chart& chart, const Point& y);

bool is_symmetric(const Mat& m, double rel_tol = 1e-12);

}  // namespace ucp
