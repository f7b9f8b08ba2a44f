#include "ucp/symbol_geometry.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace ucp {

namespace {

void check_dims(const MetricField& q, const PhasePoint& pp) {
  require(pp.x.size() == q.dim() && pp.xi.size() == q.dim(),
          "phase point dimension does not match metric dimension");
}

// Fourth-order central difference of f along direction e with step h.
template <class F>
double d4(const F& f, double h) {
  return (-f(2.0 * h) + 8.0 * f(h) - 8.0 * f(-h) + f(-2.0 * h)) / (12.0 * h);
}

using PhaseFn = std::function<double(const Point&, const Covector&)>;

// {f, g} = sum_j df/dxi_j dg/dx_j - dg/dxi_j df/dx_j, all by finite differences.
double poisson_fd(const PhaseFn& f, const PhaseFn& g, const Point& x, const Covector& xi,
                  double rel_step) {
  double acc = 0.0;
  const auto n = x.size();
  for (Eigen::Index j = 0; j < n; ++j) {
    const double hx = rel_step * std::max(1.0, std::abs(x[j]));
    const double hxi = rel_step * std::max(1.0, std::abs(xi[j]));
    auto along_x = [&](const PhaseFn& fn) {
      return [&, j](double s) {
        Point y = x;
        y[j] += s;
        return fn(y, xi);
      };
    };
    auto along_xi = [&](const PhaseFn& fn) {
      return [&, j](double s) {
        Covector e = xi;
        e[j] += s;
        return fn(x, e);
      };
    };
    const double dfdxi = d4(along_xi(f), hxi);
    const double dgdx = d4(along_x(g), hx);
    const double dgdxi = d4(along_xi(g), hxi);
    const double dfdx = d4(along_x(f), hx);
    acc += dfdxi * dgdx - dgdxi * dfdx;
  }
  return acc;
}

}  // namespace

double eval_symbol(const MetricField& q, const PhasePoint& pp) {
  check_dims(q, pp);
  return pp.xi.dot(q(pp.x) * pp.xi);
}

Signature signature(const Mat& m) {
  require(m.rows() == m.cols(), "signature: matrix must be square");
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  const Vec ev = es.eigenvalues();
  Signature s;
  const double scale = ev.size() ? ev.cwiseAbs().maxCoeff() : 0.0;
  s.tol = 1e-10 * scale;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] > s.tol)
      ++s.n_plus;
    else if (ev[i] < -s.tol)
      ++s.n_minus;
    else
      ++s.n_zero;
  }
  return s;
}

Mat lorentz_normal_form(const Mat& m) {
  const Signature sig = signature(m);
  if (!(sig.n_minus == 1 && sig.n_zero == 0))
    throw SignatureError("lorentz_normal_form: expected signature (n-1,1), got (" +
                         std::to_string(sig.n_plus) + "," + std::to_string(sig.n_minus) + "," +
                         std::to_string(sig.n_zero) + ")");
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.transpose()));
  const Vec ev = es.eigenvalues();
  const Mat& p = es.eigenvectors();
  const auto n = m.rows();
  // Eigenvalues arrive ascending: the single negative one is first. Positive
  // directions fill columns 0..n-2, the negative direction the last column.
  Mat r(n, n);
  for (Eigen::Index i = 1; i < n; ++i) r.col(i - 1) = p.col(i) / std::sqrt(ev[i]);
  r.col(n - 1) = p.col(0) / std::sqrt(-ev[0]);
  return r;
}

double hp(const MetricField& q, const ScalarField& psi, const PhasePoint& pp) {
  check_dims(q, pp);
  return 2.0 * (q(pp.x) * pp.xi).dot(psi.gradient(pp.x));
}

BracketValue hp2_eval(const MetricField& q, const ScalarField& psi, const PhasePoint& pp) {
  check_dims(q, pp);
  const auto n = pp.x.size();
  const Mat qx = q(pp.x);
  const Vec qxi = qx * pp.xi;
  const Vec dpsi = psi.gradient(pp.x);
  const Mat hess = psi.hessian(pp.x);
  const Vec qdpsi = qx * dpsi;

  double first = 0.0;
  double second = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const Mat dq = q.derivative(pp.x, static_cast<int>(j));
    const Vec dqxi = dq * pp.xi;
    const double dp_dxi = 2.0 * qxi[j];
    first += dp_dxi * (dqxi.dot(dpsi) + qxi.dot(hess.col(j)));
    second += dqxi.dot(pp.xi) * qdpsi[j];
  }
  return {2.0 * (first - second), !q.has_derivative() || !psi.has_hessian()};
}

double hp2_bracket_oracle(const MetricField& q, const ScalarField& psi, const PhasePoint& pp) {
  check_dims(q, pp);
  const PhaseFn p = [&q](const Point& x, const Covector& xi) { return xi.dot(q(x) * xi); };
  const PhaseFn lifted = [&psi](const Point& x, const Covector&) { return psi(x); };
  const PhaseFn inner = [&](const Point& x, const Covector& xi) {
    return poisson_fd(p, lifted, x, xi, 1e-3);
  };
  return poisson_fd(p, inner, pp.x, pp.xi, 1e-3);
}

Mat hp2_quadratic_form(const MetricField& q, const ScalarField& psi, const Point& x) {
  const auto n = x.size();
  Mat a(n, n);
  auto val = [&](const Vec& xi) { return hp2(q, psi, {x, xi}); };
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vec ei = Vec::Unit(n, i);
    a(i, i) = val(ei);
    for (Eigen::Index j = 0; j < i; ++j) {
      const Vec ej = Vec::Unit(n, j);
      a(i, j) = a(j, i) = 0.25 * (val(ei + ej) - val(ei - ej));
    }
  }
  return a;
}

double jacobian_condition(const Chart& chart, const Point& y) {
  Eigen::JacobiSVD<Mat> svd(chart.jacobian(y));
  const Vec s = svd.singularValues();
  if (s.size() == 0 || s[s.size() - 1] <= 0.0) return std::numeric_limits<double>::infinity();
  return s[0] / s[s.size() - 1];
}

Mat pullback_metric(const MetricField& q, const Chart& chart, const Point& y) {
  const Mat jac = chart.jacobian(y);
  require(jac.rows() == q.dim() && jac.cols() == q.dim(), "pullback_metric: jacobian shape");
  const double cond = jacobian_condition(chart, y);
  if (!(cond < 1e12)) throw ChartError("pullback_metric: singular chart jacobian");
  const Mat jinv = jac.inverse();
  const Mat qk = jinv * q(chart.forward(y)) * jinv.transpose();
  const Mat sym = 0.5 * (qk + qk.transpose());
  if (!(signature(sym) == signature(q(chart.forward(y)))))
    throw SignatureError("pullback_metric: signature not preserved");
  return sym;
}

MetricField pullback_field(const MetricField& q, const Chart& chart) {
  return MetricField(q.dim(), [q, chart](const Point& y) { return pullback_metric(q, chart, y); });
}

bool is_symmetric(const Mat& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

}  // namespace ucp
