#include "ucp/models.hpp"

#include <cmath>

namespace ucp {

ScalarField radial_field(int d) {
  const int n = d + 1;
  auto eval = [](const Point& x) { return x.tail(x.size() - 1).norm(); };
  auto grad = [n](const Point& x) {
    Vec g = Vec::Zero(n);
    const Vec y = x.tail(n - 1);
    g.tail(n - 1) = y / y.norm();
    return g;
  };
  auto hess = [n](const Point& x) {
    Mat h = Mat::Zero(n, n);
    const Vec y = x.tail(n - 1);
    const double r = y.norm();
    const Vec w = y / r;
    h.bottomRightCorner(n - 1, n - 1) =
        (Mat::Identity(n - 1, n - 1) - w * w.transpose()) / r;
    return h;
  };
  return ScalarField(eval, grad, hess);
}

namespace {

Vec unit_axis(int n, int k) {
  Vec e = Vec::Zero(n);
  e[k] = 1.0;
  return e;
}

Mat minkowski(int d) {
  Mat q = Mat::Identity(d + 1, d + 1);
  q(0, 0) = -1.0;
  return q;
}

// phi = |y| - 1 + s t
ScalarField light_cone(int d, double s) {
  return combine(1.0, radial_field(d), 1.0, linear_field(s * unit_axis(d + 1, 0), -1.0));
}

ModelSpec base_model(const std::string& name, int d, MetricField q) {
  require(d >= 2, "model: space dimension must be at least 2");
  ModelSpec m;
  m.name = name;
  m.d = d;
  m.geometry.q = std::move(q);
  m.geometry.phi_plus = light_cone(d, -1.0);
  m.geometry.phi_minus = light_cone(d, 1.0);
  Vec lo = Vec::Constant(d + 1, -1.5), hi = Vec::Constant(d + 1, 1.5);
  lo[0] = -0.5;
  hi[0] = 0.5;
  m.geometry.box = Box{lo, hi};
  m.x0 = unit_axis(d + 1, 1);
  return m;
}

}  // namespace

ModelSpec ik_model(int d) {
  ModelSpec m = base_model("ik" + std::to_string(d), d, MetricField::constant(minkowski(d)));
  m.known_constants = {
      {"sign", {2.0, 1e-8}},
      {"m0", {std::sqrt(2.0), 1e-6}},
      {"lambda0", {1.0, 1e-3}},
      {"margin_lambda2", {-6.0, 1e-3}},
  };
  return m;
}

ModelSpec conformal_model(int d, double amplitude) {
  require(d >= 2, "conformal_model: space dimension must be at least 2");
  const Mat flat = minkowski(d);
  auto arg = [](const Point& x) { return x[0] + x[1] + 0.5 * x[2]; };
  auto eval = [=](const Point& x) {
    return (std::exp(2.0 * amplitude * std::sin(arg(x))) * flat).eval();
  };
  auto deriv = [=](const Point& x, int axis) {
    const double w = axis == 0 || axis == 1 ? 1.0 : (axis == 2 ? 0.5 : 0.0);
    const double ds = amplitude * std::cos(arg(x)) * w;
    return (2.0 * ds * std::exp(2.0 * amplitude * std::sin(arg(x))) * flat).eval();
  };
  ModelSpec m = base_model("conformal" + std::to_string(d), d, MetricField(d + 1, eval, deriv));
  return m;
}

Chart flattening_chart(const ModelSpec& model, const Point& x0) {
  const int d = model.d;
  const int n = d + 1;
  require(x0.size() == n, "flattening_chart: x0 dimension mismatch");
  const double fp = model.geometry.phi_plus(x0), fm = model.geometry.phi_minus(x0);
  require(std::abs(fp) <= 1e-10 && std::abs(fm) <= 1e-10,
          "flattening_chart: x0 is not on the intersection");
  // The chart formulas below are those of the light-cone pair |y| - 1 -+ t.
  const Vec e = x0.tail(d).normalized();
  // Orthonormal completion of e.
  Mat basis = Mat::Identity(d, d);
  basis.col(0) = e;
  Eigen::HouseholderQR<Mat> qr(basis);
  Mat full = qr.householderQ() * Mat::Identity(d, d);
  if (full.col(0).dot(e) < 0) full = -full;
  const Mat u = full.rightCols(d - 1);

  Chart c;
  c.forward = [=](const Point& z) {
    const double t = 0.5 * (z[1] - z[0]);
    const double r = 1.0 + 0.5 * (z[0] + z[1]);
    const Vec v = e + u * z.tail(d - 1);
    Point x(n);
    x[0] = t;
    x.tail(d) = r * v.normalized();
    return x;
  };
  c.jacobian = [=](const Point& z) {
    const double r = 1.0 + 0.5 * (z[0] + z[1]);
    const Vec v = e + u * z.tail(d - 1);
    const double vn = v.norm();
    const Vec w = v / vn;
    Mat j = Mat::Zero(n, n);
    j(0, 0) = -0.5;
    j(0, 1) = 0.5;
    j.col(0).tail(d) = 0.5 * w;
    j.col(1).tail(d) = 0.5 * w;
    const Mat proj = Mat::Identity(d, d) - w * w.transpose();
    for (int k = 0; k < d - 1; ++k) j.col(2 + k).tail(d) = r * proj * u.col(k) / vn;
    return j;
  };
  c.inverse = [=](const Point& x) {
    const Vec y = x.tail(d);
    const double r = y.norm();
    Point z(n);
    z[0] = r - 1.0 - x[0];
    z[1] = r - 1.0 + x[0];
    const double along = y.dot(e);
    require(along > 0.0, "flattening_chart: point outside the chart's hemisphere");
    z.tail(d - 1) = u.transpose() * y / along;
    return z;
  };
  return c;
}

std::vector<ModelSpec> negative_controls() {
  std::vector<ModelSpec> out;
  ModelSpec a = ik_model(2);
  a.name = "ctrl-a";
  a.geometry.phi_minus = light_cone(2, 2.0);
  a.designated_failure = "bothcar";
  a.known_constants = {{"bothcar_residual", {-0.6, 1e-8}}, {"sign", {3.0, 1e-8}}};
  out.push_back(a);

  ModelSpec b = ik_model(2);
  b.name = "ctrl-b";
  b.geometry.phi_minus = combine(-1.0, b.geometry.phi_plus, 0.0, b.geometry.phi_plus);
  b.designated_failure = "transverse";
  b.known_constants = {};
  out.push_back(b);

  ModelSpec c = ik_model(2);
  c.name = "ctrl-c";
  c.geometry.phi_minus = combine(-1.0, c.geometry.phi_minus, 0.0, c.geometry.phi_minus);
  c.designated_failure = "sign";
  c.known_constants = {{"sign", {-2.0, 1e-8}}};
  out.push_back(c);
  return out;
}

std::vector<std::string> model_names() {
  return {"ik2", "ik3", "ctrl-a", "ctrl-b", "ctrl-c", "conformal2"};
}

ModelSpec model_by_name(const std::string& name) {
  if (name == "ik2") return ik_model(2);
  if (name == "ik3") return ik_model(3);
  if (name == "conformal2") return conformal_model(2);
  for (auto& m : negative_controls())
    if (m.name == name) return m;
  throw ConfigError("unknown model '" + name + "'");
}

}  // namespace ucp

namespace ucp {

CarlemanSetup carleman_setup(const ModelSpec& model, double lambda, double half_width) {
  require(half_width > 0.0, "carleman_setup: half width must be positive");
  CarlemanSetup s;
  const bool radial = model.name.rfind("ik", 0) == 0;
  if (radial) {
    const int d = model.d;
    Mat q(2, 2);
    q << -1.0, 0.0, 0.0, 1.0;
    s.q = MetricField::constant(q);
    s.lower.b = [d](const Point& x) {
      Vec b(2);
      b << 0.0, (d - 1) / x[1];
      return b;
    };
    // psi1 = r - 1, psi0 = t
    s.psi = ScalarField(
        [lambda](const Point& x) { return x[1] - 1.0 - lambda * x[0] * x[0]; },
        [lambda](const Point& x) {
          Vec g(2);
          g << -2.0 * lambda * x[0], 1.0;
          return g;
        },
        [lambda](const Point&) {
          Mat h = Mat::Zero(2, 2);
          h(0, 0) = -2.0 * lambda;
          return h;
        });
    Vec c(2);
    c << model.x0[0], model.x0.tail(model.d).norm();
    s.box = Box{c.array() - half_width, c.array() + half_width};
    s.coordinates = "t,r";
  } else {
    auto [psi0, psi1] = build_psi(model.geometry);
    s.q = model.geometry.q;
    s.psi = combine(1.0, psi1, -lambda, square(psi0));
    s.box = Box{model.x0.array() - half_width, model.x0.array() + half_width};
    s.coordinates = "x";
  }
  return s;
}

}  // namespace ucp
