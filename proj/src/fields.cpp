#include "ucp/fields.hpp"

#include <cmath>

namespace ucp {

double fd_step(double coordinate) { return 1e-4 * std::max(1.0, std::abs(coordinate)); }

//--------------------------------------------------------------------------------------------------

MetricField::MetricField(int dim, EvalFn eval, DerivFn deriv)
    : dim_(dim), eval_(std::move(eval)), deriv_(std::move(deriv)) {
  require(dim_ >= 2, "MetricField: dimension must be at least 2");
  require(static_cast<bool>(eval_), "MetricField: missing evaluation callback");
}

MetricField MetricField::constant(const Mat& q) {
  require(q.rows() == q.cols(), "MetricField::constant: matrix must be square");
  const Mat sym = 0.5 * (q + q.transpose());
  const auto n = sym.rows();
  return MetricField(
      static_cast<int>(n), [sym](const Point&) { return sym; },
      [n](const Point&, int) { return Mat::Zero(n, n).eval(); });
}

Mat MetricField::operator()(const Point& x) const {
  require(x.size() == dim_, "MetricField: point dimension mismatch");
  return eval_(x);
}

Mat MetricField::derivative(const Point& x, int axis) const {
  require(x.size() == dim_, "MetricField: point dimension mismatch");
  require(axis >= 0 && axis < dim_, "MetricField: axis out of range");
  if (deriv_) return deriv_(x, axis);
  const double h = fd_step(x[axis]);
  Point xp = x, xm = x;
  xp[axis] += h;
  xm[axis] -= h;
  return (eval_(xp) - eval_(xm)) / (2.0 * h);
}

MetricField MetricField::scaled(double c) const {
  auto eval = eval_;
  auto deriv = deriv_;
  MetricField::DerivFn scaled_deriv;
  if (deriv) scaled_deriv = [deriv, c](const Point& x, int j) { return (c * deriv(x, j)).eval(); };
  return MetricField(dim_, [eval, c](const Point& x) { return (c * eval(x)).eval(); },
                     scaled_deriv);
}

//--------------------------------------------------------------------------------------------------

ScalarField::ScalarField(EvalFn eval, GradFn grad, HessFn hess)
    : eval_(std::move(eval)), grad_(std::move(grad)), hess_(std::move(hess)) {
  require(static_cast<bool>(eval_), "ScalarField: missing evaluation callback");
}

Covector ScalarField::gradient(const Point& x) const {
  if (grad_) return grad_(x);
  return fd_gradient(*this, x);
}

Mat ScalarField::hessian(const Point& x) const {
  if (hess_) return hess_(x);
  return fd_hessian(*this, x);
}

Covector fd_gradient(const ScalarField& f, const Point& x) {
  const auto n = x.size();
  Covector g(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double h = fd_step(x[j]);
    Point xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    g[j] = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

Mat fd_hessian(const ScalarField& f, const Point& x) {
  const auto n = x.size();
  Mat hess(n, n);
  if (f.has_gradient()) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double h = fd_step(x[j]);
      Point xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      hess.col(j) = (f.gradient(xp) - f.gradient(xm)) / (2.0 * h);
    }
  } else {
    // Second differences of values; the step is enlarged to keep the
    // cancellation error near the truncation error.
    const double f0 = f(x);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double hj = 1e2 * fd_step(x[j]);
      for (Eigen::Index k = j; k < n; ++k) {
        const double hk = 1e2 * fd_step(x[k]);
        double v;
        if (j == k) {
          Point xp = x, xm = x;
          xp[j] += hj;
          xm[j] -= hj;
          v = (f(xp) - 2.0 * f0 + f(xm)) / (hj * hj);
        } else {
          Point xpp = x, xpm = x, xmp = x, xmm = x;
          xpp[j] += hj, xpp[k] += hk;
          xpm[j] += hj, xpm[k] -= hk;
          xmp[j] -= hj, xmp[k] += hk;
          xmm[j] -= hj, xmm[k] -= hk;
          v = (f(xpp) - f(xpm) - f(xmp) + f(xmm)) / (4.0 * hj * hk);
        }
        hess(j, k) = hess(k, j) = v;
      }
    }
  }
  return 0.5 * (hess + hess.transpose());
}

//--------------------------------------------------------------------------------------------------

ScalarField constant_field(double c) {
  return ScalarField([c](const Point&) { return c; },
                     [](const Point& x) { return Vec::Zero(x.size()).eval(); },
                     [](const Point& x) { return Mat::Zero(x.size(), x.size()).eval(); });
}

ScalarField linear_field(const Vec& coeffs, double offset) {
  return ScalarField([coeffs, offset](const Point& x) { return coeffs.dot(x) + offset; },
                     [coeffs](const Point&) { return coeffs; },
                     [coeffs](const Point&) { return Mat::Zero(coeffs.size(), coeffs.size()).eval(); });
}

ScalarField combine(double a, const ScalarField& f, double b, const ScalarField& g) {
  return ScalarField([=](const Point& x) { return a * f(x) + b * g(x); },
                     [=](const Point& x) { return (a * f.gradient(x) + b * g.gradient(x)).eval(); },
                     [=](const Point& x) { return (a * f.hessian(x) + b * g.hessian(x)).eval(); });
}

ScalarField product(const ScalarField& f, const ScalarField& g) {
  return ScalarField(
      [=](const Point& x) { return f(x) * g(x); },
      [=](const Point& x) { return (g(x) * f.gradient(x) + f(x) * g.gradient(x)).eval(); },
      [=](const Point& x) {
        const Vec df = f.gradient(x), dg = g.gradient(x);
        return (g(x) * f.hessian(x) + f(x) * g.hessian(x) + df * dg.transpose() +
                dg * df.transpose())
            .eval();
      });
}

ScalarField square(const ScalarField& f) {
  return ScalarField(
      [=](const Point& x) {
        const double v = f(x);
        return v * v;
      },
      [=](const Point& x) { return (2.0 * f(x) * f.gradient(x)).eval(); },
      [=](const Point& x) {
        const Vec df = f.gradient(x);
        return (2.0 * f(x) * f.hessian(x) + 2.0 * df * df.transpose()).eval();
      });
}

ScalarField exp_convexified(const ScalarField& f, double mu) {
  return ScalarField(
      [=](const Point& x) { return std::expm1(mu * f(x)); },
      [=](const Point& x) { return (mu * std::exp(mu * f(x)) * f.gradient(x)).eval(); },
      [=](const Point& x) {
        const double e = std::exp(mu * f(x));
        const Vec df = f.gradient(x);
        return (mu * e * f.hessian(x) + mu * mu * e * df * df.transpose()).eval();
      });
}

//--------------------------------------------------------------------------------------------------

Chart Chart::identity(int dim) {
  return Chart{[](const Point& z) { return z; },
               [dim](const Point&) { return Mat::Identity(dim, dim).eval(); },
               [](const Point& x) { return x; }};
}

Chart Chart::linear(const Mat& a) {
  const Mat inv = a.inverse();
  return Chart{[a](const Point& z) { return (a * z).eval(); }, [a](const Point&) { return a; },
               [inv](const Point& x) { return (inv * x).eval(); }};
}

ScalarField transport(const ScalarField& psi, const Chart& chart) {
  return ScalarField([=](const Point& z) { return psi(chart.forward(z)); },
                     [=](const Point& z) {
                       return (chart.jacobian(z).transpose() * psi.gradient(chart.forward(z))).eval();
                     });
}

}  // namespace ucp
