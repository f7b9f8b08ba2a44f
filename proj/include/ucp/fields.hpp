#pragma once

#include "ucp/types.hpp"

#include <functional>
#include <optional>

namespace ucp {

/// Central-difference step used when an analytic derivative supplier is
/// absent: 1e-4 times the local coordinate scale max(1, |x_j|).
double fd_step(double coordinate);

//--------------------------------------------------------------------------------------------------
// MetricField: x -> Q(x), a symmetric n x n matrix of Lorentzian signature.
// The derivative supplier is optional; central differences stand in for it.

class MetricField {
 public:
  using EvalFn = std::function<Mat(const Point&)>;
  using DerivFn = std::function<Mat(const Point&, int axis)>;

  MetricField() = default;
  MetricField(int dim, EvalFn eval, DerivFn deriv = {});

  static MetricField constant(const Mat& q);

  int dim() const { return dim_; }
  Mat operator()(const Point& x) const;
  /// dQ/dx_axis at x.
  Mat derivative(const Point& x, int axis) const;
  bool has_derivative() const { return static_cast<bool>(deriv_); }
  /// Same field scaled by a constant factor.
  MetricField scaled(double c) const;

 private:
  int dim_ = 0;
  EvalFn eval_;
  DerivFn deriv_;
};

//--------------------------------------------------------------------------------------------------
// ScalarField: x -> psi(x) with optional gradient and Hessian suppliers.

class ScalarField {
 public:
  using EvalFn = std::function<double(const Point&)>;
  using GradFn = std::function<Vec(const Point&)>;
  using HessFn = std::function<Mat(const Point&)>;

  ScalarField() = default;
  explicit ScalarField(EvalFn eval, GradFn grad = {}, HessFn hess = {});

  double operator()(const Point& x) const { return eval_(x); }
  Covector gradient(const Point& x) const;
  Mat hessian(const Point& x) const;

  bool has_gradient() const { return static_cast<bool>(grad_); }
  bool has_hessian() const { return static_cast<bool>(hess_); }
  bool valid() const { return static_cast<bool>(eval_); }

 private:
  EvalFn eval_;
  GradFn grad_;
  HessFn hess_;
};

/// Finite-difference gradient of the evaluation callback only.
Covector fd_gradient(const ScalarField& f, const Point& x);
/// Finite-difference Hessian from the gradient supplier (or from values when
/// no gradient is supplied). Result is symmetrized.
Mat fd_hessian(const ScalarField& f, const Point& x);

// Algebra on scalar fields. Gradient and Hessian suppliers are assembled
// analytically from those of the operands (product and chain rules).
ScalarField constant_field(double c);
ScalarField linear_field(const Vec& coeffs, double offset = 0.0);
ScalarField combine(double a, const ScalarField& f, double b, const ScalarField& g);
ScalarField product(const ScalarField& f, const ScalarField& g);
ScalarField square(const ScalarField& f);
/// exp(mu * f) - 1.
ScalarField exp_convexified(const ScalarField& f, double mu);

//--------------------------------------------------------------------------------------------------
// Chart: a local diffeomorphism kappa from chart coordinates z to x.

struct Chart {
  std::function<Point(const Point&)> forward;
  std::function<Mat(const Point&)> jacobian;  // kappa'(z), d x_i / d z_j
  std::function<Point(const Point&)> inverse;

  static Chart identity(int dim);
  static Chart linear(const Mat& a);
};

/// psi o kappa, with gradient J^T grad psi; the Hessian falls back to finite
/// differences of that gradient.
ScalarField transport(const ScalarField& psi, const Chart& chart);

}  // namespace ucp
