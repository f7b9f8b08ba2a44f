#pragma once

#include "ucp/grid.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace ucp {

/// U on (-1, 1)^n (n = 2 or 3) with analytic derivatives, sampled on a grid,
/// plus the two face-vanishing flags
///   U(0, y2, y3) = 0 for y2 >= 0   and   U(y1, 0, y3) = 0 for y1 >= 0.
struct CornerField {
  ScalarField u;  // must supply analytic gradient and Hessian
  GridFunction grid;
  bool vanishes_on_face1 = false;
  bool vanishes_on_face2 = false;

  static CornerField make(ScalarField u, int dim, int cells, double tol_zero = 1e-12);
  int dim() const { return grid.dim(); }
  int cells() const { return grid.cells(); }
  /// d^alpha U for |alpha| <= 2 from the analytic suppliers.
  double derivative(const std::vector<int>& alpha, const Point& y) const;
};

/// V = H(y1) H(y2) U with H(0) = 1 (closed quadrant).
GridFunction extend_by_zero(const CornerField& u);

/// (-1)^|alpha| * trapezoid sum of V d^alpha(phi). With `richardson`, one
/// extrapolation level against the every-other-node sum.
double weak_pairing(const GridFunction& v, const std::vector<int>& alpha, const TestFunction& phi,
                    bool richardson = false);

/// Trapezoid quadrature of f * phi over the closed quadrant
/// {y1 >= 0, y2 >= 0} of the grid (half weights on its faces).
double quadrant_quadrature(const GridFunction& grid, const std::function<double(const Point&)>& f,
                           const TestFunction& phi);

struct WeakIdentity {
  std::string family;  // "111", "222", "333" or "444"
  std::vector<int> alpha;
};

/// Identities inherited by V for a dimension: first derivatives in y1, y2;
/// d1 d2; d1 dj and d2 dj; dj dk (j, k >= 3).
std::vector<WeakIdentity> lemma21_identities(int dim);

struct WeakResidual {
  std::string family;
  std::vector<int> alpha;
  int test_id = 0;
  double lhs = 0.0;  // weak pairing of V
  double rhs = 0.0;  // quadrature of H H d^alpha U phi
  double residual = 0.0;
};

struct Lemma21Report {
  std::vector<WeakResidual> rows;
  std::map<std::string, double> max_residual;  // per family
  double h = 0.0;
  bool pass = false;  // every residual within K_family h^2 (when K supplied)
};

/// Throws HypothesisError when either face-vanishing flag is false.
Lemma21Report verify_lemma21(const CornerField& u, const std::vector<TestFunction>& tests,
                             const std::map<std::string, double>& k_family = {});

/// Same residual table without the hypothesis gate (used for negative probes).
Lemma21Report lemma21_residuals(const CornerField& u, const std::vector<TestFunction>& tests);

struct LayerRow {
  int test_id = 0;
  double delta = 0.0;    // weak d1^2 V pairing minus quadrature of H H d1^2 U
  double surface = 0.0;  // integral over {y1 = 0, y2 >= 0} of d1 U phi
};

struct LayerReport {
  std::vector<LayerRow> rows;
  double max_mismatch = 0.0;  // max |delta - surface|
  double max_layer = 0.0;     // max |surface|
};

LayerReport detect_layer(const CornerField& u, const std::vector<TestFunction>& tests);

/// Symmetric matrix field B(y) with continuous derivatives.
using BMatrixField = std::function<Mat(const Point&)>;

/// max over open-quadrant grid nodes of |<B d, d> U| / (|grad U| + |U|).
double measure_c(const CornerField& u, const BMatrixField& b);

struct Lemma23Report {
  bool pass = false;
  int n_points = 0;
  int violations = 0;
  int off_quadrant = 0;       // sampled points where V and its derivatives vanish
  double worst_ratio = 0.0;   // max |<B d,d> V| / (C (|grad V| + |V|)) over points with nonzero rhs
  double max_fd_mismatch = 0.0;  // identity vs finite differences of V away from the faces
};

/// Checks the U-side inequality on all open-quadrant nodes (HypothesisError
/// with witness on failure) and then the V-side inequality at n_pts random
/// off-face nodes with the same constant.
Lemma23Report verify_lemma23(const CornerField& u, const BMatrixField& b, double c, int n_pts,
                             unsigned long long seed = 11, double tol_char = 1e-8);

/// Smooth bump rho supported in the unit ball with unit integral; separable
/// as a product of one-dimensional bumps of half-width 1/sqrt(n).
/// Returns the L2 norms of the Hessian commutator
///   D_eps(v) = a d^2(rho_eps * v) - rho_eps * (a d^2 v)
/// for every eps, the second term in weak form (one derivative moved onto
/// rho_eps a). Throws ResolutionError when eps < 4h.
std::vector<double> mollifier_commutator(const ScalarField& a, const GridFunction& v,
                                         const std::vector<double>& eps_list);

}  // namespace ucp

namespace ucp {

/// Named analytic U satisfying both face conditions.
struct CornerSample {
  std::string name;
  ScalarField u;
};

/// Five fields for dim = 2; for dim = 3 each is multiplied by 1 + 0.5 sin(2 y3).
std::vector<CornerSample> analytic_corner_corpus(int dim);

/// K per identity family: safety * max residual / h^2 over the corpus at the
/// given (coarse) resolution.
std::map<std::string, double> fit_weak_constants(const std::vector<CornerSample>& corpus,
                                                 const std::vector<TestFunction>& tests, int dim,
                                                 int cells, double safety = 1.5);

}  // namespace ucp
