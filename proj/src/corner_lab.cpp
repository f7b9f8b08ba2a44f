#include "ucp/corner_lab.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace ucp {

namespace {

int face_index(const GridFunction& g) {
  require(g.cells() % 2 == 0, "corner lab: the number of cells must be even so y = 0 is a node");
  return g.cells() / 2;
}

struct SubBox {
  std::vector<int> lo, hi;  // inclusive node ranges
};

SubBox support_nodes(const GridFunction& g, const TestFunction& phi) {
  SubBox s;
  for (int k = 0; k < g.dim(); ++k) {
    const double h = g.spacing(k);
    const double a = phi.center[k] - phi.radius[k], b = phi.center[k] + phi.radius[k];
    s.lo.push_back(std::max(0, static_cast<int>(std::floor((a - g.box().lo[k]) / h))));
    s.hi.push_back(std::min(g.cells(), static_cast<int>(std::ceil((b - g.box().lo[k]) / h))));
  }
  return s;
}

void check_support(const GridFunction& g, const TestFunction& phi) {
  require(phi.dim() == g.dim(), "test function dimension mismatch");
  for (int k = 0; k < g.dim(); ++k)
    if (!(phi.center[k] - phi.radius[k] > g.box().lo[k] &&
          phi.center[k] + phi.radius[k] < g.box().hi[k]))
      throw SupportError("test function support touches the grid boundary");
}

// Visits every node of the sub-box; fn(flat index, idx).
template <class Fn>
void for_each_node(const GridFunction& g, const SubBox& s, Fn&& fn) {
  const int n = g.dim();
  std::vector<int> idx = s.lo;
  for (int k = 0; k < n; ++k)
    if (s.lo[k] > s.hi[k]) return;
  while (true) {
    fn(g.flatten(idx), idx);
    int k = n - 1;
    while (k >= 0) {
      if (++idx[k] <= s.hi[k]) break;
      idx[k] = s.lo[k];
      --k;
    }
    if (k < 0) return;
  }
}

// Per-axis factor tables for d^alpha phi on the nodes of the sub-box.
std::vector<std::vector<double>> factor_tables(const GridFunction& g, const SubBox& s,
                                               const TestFunction& phi,
                                               const std::vector<int>& alpha) {
  std::vector<std::vector<double>> t(g.dim());
  for (int k = 0; k < g.dim(); ++k)
    for (int i = s.lo[k]; i <= s.hi[k]; ++i) t[k].push_back(phi.factor(k, alpha[k], g.coord(k, i)));
  return t;
}

double phi_from_tables(const std::vector<std::vector<double>>& t, const SubBox& s,
                       const std::vector<int>& idx) {
  double w = 1.0;
  for (size_t k = 0; k < t.size(); ++k) w *= t[k][idx[k] - s.lo[k]];
  return w;
}

double pairing_sum(const GridFunction& v, const std::vector<int>& alpha, const TestFunction& phi,
                   int every) {
  const SubBox s = support_nodes(v, phi);
  const auto t = factor_tables(v, s, phi, alpha);
  double acc = 0.0;
  for_each_node(v, s, [&](long flat, const std::vector<int>& idx) {
    for (int i : idx)
      if (i % every != 0) return;
    acc += v[flat] * phi_from_tables(t, s, idx);
  });
  double vol = 1.0;
  for (int k = 0; k < v.dim(); ++k) vol *= every * v.spacing(k);
  return acc * vol;
}

}  // namespace

//--------------------------------------------------------------------------------------------------

CornerField CornerField::make(ScalarField u, int dim, int cells, double tol_zero) {
  require(dim == 2 || dim == 3, "CornerField: dimension must be 2 or 3");
  require(u.has_gradient() && u.has_hessian(), "CornerField: U needs analytic derivatives");
  CornerField cf{std::move(u), GridFunction::unit(dim, cells)};
  const int i0 = face_index(cf.grid);
  std::vector<int> idx;
  double face1 = 0.0, face2 = 0.0;
  for (long i = 0; i < cf.grid.size(); ++i) {
    const Point y = cf.grid.node(i);
    const double val = cf.u(y);
    cf.grid[i] = val;
    cf.grid.unflatten(i, idx);
    if (idx[0] == i0 && idx[1] >= i0) face1 = std::max(face1, std::abs(val));
    if (idx[1] == i0 && idx[0] >= i0) face2 = std::max(face2, std::abs(val));
  }
  cf.vanishes_on_face1 = face1 <= tol_zero;
  cf.vanishes_on_face2 = face2 <= tol_zero;
  return cf;
}

double CornerField::derivative(const std::vector<int>& alpha, const Point& y) const {
  int order = 0;
  std::vector<int> axes;
  for (size_t k = 0; k < alpha.size(); ++k) {
    order += alpha[k];
    for (int r = 0; r < alpha[k]; ++r) axes.push_back(static_cast<int>(k));
  }
  require(order <= 2, "CornerField::derivative: order above 2");
  if (order == 0) return u(y);
  if (order == 1) return u.gradient(y)[axes[0]];
  return u.hessian(y)(axes[0], axes[1]);
}

GridFunction extend_by_zero(const CornerField& u) {
  GridFunction v = u.grid;
  const int i0 = face_index(v);
  std::vector<int> idx;
  for (long i = 0; i < v.size(); ++i) {
    v.unflatten(i, idx);
    if (!(idx[0] >= i0 && idx[1] >= i0)) v[i] = 0.0;
  }
  return v;
}

double weak_pairing(const GridFunction& v, const std::vector<int>& alpha, const TestFunction& phi,
                    bool richardson) {
  check_support(v, phi);
  require(static_cast<int>(alpha.size()) == v.dim(), "weak_pairing: multi-index dimension");
  int order = 0;
  for (int a : alpha) order += a;
  const double sign = order % 2 == 0 ? 1.0 : -1.0;
  const double fine = pairing_sum(v, alpha, phi, 1);
  if (!richardson) return sign * fine;
  const double coarse = pairing_sum(v, alpha, phi, 2);
  return sign * (4.0 * fine - coarse) / 3.0;
}

double quadrant_quadrature(const GridFunction& grid, const std::function<double(const Point&)>& f,
                           const TestFunction& phi) {
  check_support(grid, phi);
  const int i0 = face_index(grid);
  SubBox s = support_nodes(grid, phi);
  s.lo[0] = std::max(s.lo[0], i0);
  s.lo[1] = std::max(s.lo[1], i0);
  const auto t = factor_tables(grid, s, phi, std::vector<int>(grid.dim(), 0));
  double acc = 0.0;
  for_each_node(grid, s, [&](long flat, const std::vector<int>& idx) {
    double w = phi_from_tables(t, s, idx);
    if (w == 0.0) return;
    if (idx[0] == i0) w *= 0.5;
    if (idx[1] == i0) w *= 0.5;
    acc += w * f(grid.node(flat));
  });
  return acc * grid.cell_volume();
}

std::vector<WeakIdentity> lemma21_identities(int dim) {
  std::vector<WeakIdentity> out;
  auto multi = [dim](std::initializer_list<std::pair<int, int>> entries) {
    std::vector<int> a(dim, 0);
    for (auto [axis, order] : entries) a[axis] += order;
    return a;
  };
  out.push_back({"111", multi({{0, 1}})});
  out.push_back({"111", multi({{1, 1}})});
  out.push_back({"222", multi({{0, 1}, {1, 1}})});
  for (int j = 2; j < dim; ++j) {
    out.push_back({"333", multi({{0, 1}, {j, 1}})});
    out.push_back({"333", multi({{1, 1}, {j, 1}})});
    for (int k = j; k < dim; ++k) out.push_back({"444", multi({{j, 1}, {k, 1}})});
  }
  return out;
}

Lemma21Report lemma21_residuals(const CornerField& u, const std::vector<TestFunction>& tests) {
  const GridFunction v = extend_by_zero(u);
  Lemma21Report rep;
  rep.h = v.spacing(0);
  for (const auto& id : lemma21_identities(u.dim())) {
    for (size_t t = 0; t < tests.size(); ++t) {
      WeakResidual r{id.family, id.alpha, static_cast<int>(t)};
      r.lhs = weak_pairing(v, id.alpha, tests[t]);
      r.rhs = quadrant_quadrature(
          v, [&](const Point& y) { return u.derivative(id.alpha, y); }, tests[t]);
      r.residual = std::abs(r.lhs - r.rhs);
      rep.max_residual[id.family] = std::max(rep.max_residual[id.family], r.residual);
      rep.rows.push_back(r);
    }
  }
  return rep;
}

Lemma21Report verify_lemma21(const CornerField& u, const std::vector<TestFunction>& tests,
                             const std::map<std::string, double>& k_family) {
  if (!u.vanishes_on_face1 || !u.vanishes_on_face2)
    throw HypothesisError("verify_lemma21: U does not vanish on both faces of the quadrant");
  Lemma21Report rep = lemma21_residuals(u, tests);
  rep.pass = true;
  const double h2 = rep.h * rep.h;
  for (const auto& r : rep.rows) {
    auto it = k_family.find(r.family);
    if (it != k_family.end() && r.residual > it->second * h2) rep.pass = false;
  }
  return rep;
}

LayerReport detect_layer(const CornerField& u, const std::vector<TestFunction>& tests) {
  const GridFunction v = extend_by_zero(u);
  const int n = u.dim();
  const int i0 = face_index(v);
  std::vector<int> d11(n, 0), d1(n, 0);
  d11[0] = 2;
  d1[0] = 1;
  LayerReport rep;
  for (size_t t = 0; t < tests.size(); ++t) {
    const TestFunction& phi = tests[t];
    LayerRow row;
    row.test_id = static_cast<int>(t);
    row.delta = weak_pairing(v, d11, phi) -
                quadrant_quadrature(v, [&](const Point& y) { return u.derivative(d11, y); }, phi);
    SubBox s = support_nodes(v, phi);
    s.lo[0] = s.hi[0] = i0;
    s.lo[1] = std::max(s.lo[1], i0);
    double acc = 0.0;
    for_each_node(v, s, [&](long flat, const std::vector<int>& idx) {
      const Point y = v.node(flat);
      double w = phi(y);
      if (w == 0.0) return;
      if (idx[1] == i0) w *= 0.5;
      acc += w * u.derivative(d1, y);
    });
    double area = 1.0;
    for (int k = 1; k < n; ++k) area *= v.spacing(k);
    row.surface = acc * area;
    rep.max_mismatch = std::max(rep.max_mismatch, std::abs(row.delta - row.surface));
    rep.max_layer = std::max(rep.max_layer, std::abs(row.surface));
    rep.rows.push_back(row);
  }
  return rep;
}

//--------------------------------------------------------------------------------------------------

namespace {

double b_operator(const Mat& b, const Mat& hess) { return (b.array() * hess.array()).sum(); }

bool open_quadrant_interior(const std::vector<int>& idx, int i0, int cells) {
  if (!(idx[0] > i0 && idx[1] > i0)) return false;
  for (int i : idx)
    if (i <= 0 || i >= cells) return false;
  return true;
}

}  // namespace

double measure_c(const CornerField& u, const BMatrixField& b) {
  const int i0 = face_index(u.grid);
  std::vector<int> idx;
  double c = 0.0;
  for (long i = 0; i < u.grid.size(); ++i) {
    u.grid.unflatten(i, idx);
    if (!open_quadrant_interior(idx, i0, u.cells())) continue;
    const Point y = u.grid.node(i);
    const double lhs = std::abs(b_operator(b(y), u.u.hessian(y)));
    const double rhs = u.u.gradient(y).norm() + std::abs(u.u(y));
    if (rhs == 0.0) {
      if (lhs > 0.0) return std::numeric_limits<double>::infinity();
      continue;
    }
    c = std::max(c, lhs / rhs);
  }
  return c;
}

Lemma23Report verify_lemma23(const CornerField& u, const BMatrixField& b, double c, int n_pts,
                             unsigned long long seed, double tol_char) {
  require(c >= 0.0, "verify_lemma23: C must be nonnegative");
  const int i0 = face_index(u.grid);
  const int cells = u.cells();
  std::vector<int> idx;
  constexpr double slack = 1e-12;

  for (long i = 0; i < u.grid.size(); ++i) {
    const Mat bm = b(u.grid.node(i));
    if (std::abs(bm(0, 0)) > tol_char || std::abs(bm(1, 1)) > tol_char)
      throw HypothesisError("verify_lemma23: beta11 or beta22 does not vanish");
  }
  for (long i = 0; i < u.grid.size(); ++i) {
    u.grid.unflatten(i, idx);
    if (!open_quadrant_interior(idx, i0, cells)) continue;
    const Point y = u.grid.node(i);
    const double lhs = std::abs(b_operator(b(y), u.u.hessian(y)));
    const double rhs = c * (u.u.gradient(y).norm() + std::abs(u.u(y)));
    if (lhs > rhs * (1.0 + slack)) {
      std::string where;
      for (int k = 0; k < y.size(); ++k) where += (k ? "," : "") + std::to_string(y[k]);
      throw HypothesisError("verify_lemma23: U-side inequality fails at (" + where + ")");
    }
  }

  const GridFunction v = extend_by_zero(u);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(1, cells - 1);
  Lemma23Report rep;
  const int n = u.dim();
  while (rep.n_points < n_pts) {
    idx.assign(n, 0);
    for (int k = 0; k < n; ++k) idx[k] = pick(rng);
    if (idx[0] == i0 || idx[1] == i0) continue;
    ++rep.n_points;
    const long flat = v.flatten(idx);
    const Point y = v.node(flat);
    const double hh = (idx[0] > i0 && idx[1] > i0) ? 1.0 : 0.0;
    const Mat hess = u.u.hessian(y);
    const Mat bm = b(y);
    const double bv = hh * b_operator(bm, hess);
    const double grad_v = hh * u.u.gradient(y).norm();
    const double val_v = hh * std::abs(u.u(y));
    const double rhs = c * (grad_v + val_v);
    if (hh == 0.0) ++rep.off_quadrant;
    if (std::abs(bv) > rhs * (1.0 + slack)) ++rep.violations;
    if (rhs > 0.0) rep.worst_ratio = std::max(rep.worst_ratio, std::abs(bv) / rhs);

    // Finite differences of V itself, where the stencil stays off the faces.
    bool clear = true;
    for (int k = 0; k < n; ++k)
      if (idx[k] < 2 || idx[k] > cells - 2) clear = false;
    if (std::abs(idx[0] - i0) < 2 || std::abs(idx[1] - i0) < 2) clear = false;
    if (clear) {
      Mat fd(n, n);
      for (int j = 0; j < n; ++j) {
        const double hj = v.spacing(j);
        const long sj = v.stride(j);
        fd(j, j) = (v[flat + sj] - 2.0 * v[flat] + v[flat - sj]) / (hj * hj);
        for (int k = j + 1; k < n; ++k) {
          const double hk = v.spacing(k);
          const long sk = v.stride(k);
          fd(j, k) = fd(k, j) = (v[flat + sj + sk] - v[flat + sj - sk] - v[flat - sj + sk] +
                                 v[flat - sj - sk]) /
                                (4.0 * hj * hk);
        }
      }
      rep.max_fd_mismatch = std::max(rep.max_fd_mismatch, std::abs(b_operator(bm, fd) - bv));
    }
  }
  rep.pass = rep.violations == 0;
  return rep;
}

//--------------------------------------------------------------------------------------------------

namespace {

// dst[x] = sum_q kernel[q + m] src[x - q] along one axis, zero outside.
void convolve_axis(const GridFunction& g, const std::vector<double>& src, int axis,
                   const std::vector<double>& kernel, std::vector<double>& dst) {
  const int m = static_cast<int>(kernel.size() / 2);
  const long stride = g.stride(axis);
  const int nodes = g.nodes_per_axis();
  dst.assign(src.size(), 0.0);
  for (long i = 0; i < static_cast<long>(src.size()); ++i) {
    const int ia = static_cast<int>((i / stride) % nodes);
    const int qlo = std::max(-m, ia - (nodes - 1));
    const int qhi = std::min(m, ia);
    double acc = 0.0;
    for (int q = qlo; q <= qhi; ++q) acc += kernel[q + m] * src[i - q * stride];
    dst[i] = acc;
  }
}

// Separable convolution; kernels[k] is the (h-weighted) one-dimensional
// kernel applied along axis k.
std::vector<double> convolve(const GridFunction& g, const std::vector<double>& src,
                             const std::vector<const std::vector<double>*>& kernels) {
  std::vector<double> a = src, b;
  for (int k = 0; k < g.dim(); ++k) {
    convolve_axis(g, a, k, *kernels[k], b);
    a.swap(b);
  }
  return a;
}

}  // namespace

std::vector<double> mollifier_commutator(const ScalarField& a, const GridFunction& v,
                                         const std::vector<double>& eps_list) {
  const int n = v.dim();
  double hmax = 0.0;
  for (int k = 0; k < n; ++k) hmax = std::max(hmax, v.spacing(k));
  for (double eps : eps_list)
    if (!(eps >= 4.0 * hmax))
      throw ResolutionError("mollifier_commutator: eps = " + std::to_string(eps) +
                            " below 4h = " + std::to_string(4.0 * hmax));

  // Gradient of v by central differences (v vanishes near the boundary).
  std::vector<std::vector<double>> grad(n, std::vector<double>(v.size(), 0.0));
  std::vector<int> idx;
  for (long i = 0; i < v.size(); ++i) {
    v.unflatten(i, idx);
    for (int k = 0; k < n; ++k) {
      if (idx[k] == 0 || idx[k] == v.cells()) continue;
      const long s = v.stride(k);
      grad[k][i] = (v[i + s] - v[i - s]) / (2.0 * v.spacing(k));
    }
  }
  std::vector<double> a_val(v.size());
  std::vector<std::vector<double>> a_grad(n, std::vector<double>(v.size()));
  for (long i = 0; i < v.size(); ++i) {
    const Point y = v.node(i);
    a_val[i] = a(y);
    const Vec da = a.gradient(y);
    for (int k = 0; k < n; ++k) a_grad[k][i] = da[k];
  }

  std::vector<double> norms;
  const double half_width = 1.0 / std::sqrt(static_cast<double>(n));
  for (double eps : eps_list) {
    // Per-axis kernels: rho factor and its derivative, each weighted by h and
    // normalized so the discrete rho integrates to one.
    std::vector<std::vector<double>> k0(n), k1(n);
    for (int k = 0; k < n; ++k) {
      const double h = v.spacing(k);
      const double w = eps * half_width;
      const int m = static_cast<int>(std::ceil(w / h));
      double mass = 0.0;
      for (int q = -m; q <= m; ++q) {
        const auto b = bump1d(q * h / w);
        k0[k].push_back(b[0] * h);
        k1[k].push_back(b[1] / w * h);
        mass += b[0] * h;
      }
      for (auto& x : k0[k]) x /= mass;
      for (auto& x : k1[k]) x /= mass;
    }
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
      std::vector<const std::vector<double>*> kj(n), k_rho(n);
      for (int k = 0; k < n; ++k) {
        kj[k] = k == j ? &k1[k] : &k0[k];
        k_rho[k] = &k0[k];
      }
      for (int l = 0; l < n; ++l) {
        const auto& g = grad[l];
        std::vector<double> ag(v.size()), dag(v.size());
        for (long i = 0; i < v.size(); ++i) {
          ag[i] = a_val[i] * g[i];
          dag[i] = a_grad[j][i] * g[i];
        }
        const auto t1 = convolve(v, g, kj);
        const auto t2 = convolve(v, ag, kj);
        const auto t3 = convolve(v, dag, k_rho);
        for (long i = 0; i < v.size(); ++i) {
          const double d = a_val[i] * t1[i] - t2[i] + t3[i];
          acc += d * d;
        }
      }
    }
    norms.push_back(std::sqrt(acc * v.cell_volume()));
  }
  return norms;
}

}  // namespace ucp

namespace ucp {

namespace {

ScalarField coordinate(int n, int axis) {
  Vec c = Vec::Zero(n);
  c[axis] = 1.0;
  return linear_field(c);
}

// sin(k y_axis) or cos(k y_axis)
ScalarField trig(int n, int axis, double k, bool cosine) {
  return ScalarField(
      [=](const Point& y) { return cosine ? std::cos(k * y[axis]) : std::sin(k * y[axis]); },
      [=](const Point& y) {
        Vec g = Vec::Zero(n);
        g[axis] = cosine ? -k * std::sin(k * y[axis]) : k * std::cos(k * y[axis]);
        return g;
      },
      [=](const Point& y) {
        Mat h = Mat::Zero(n, n);
        h(axis, axis) = -k * k * (cosine ? std::cos(k * y[axis]) : std::sin(k * y[axis]));
        return h;
      });
}

}  // namespace

std::vector<CornerSample> analytic_corner_corpus(int dim) {
  require(dim == 2 || dim == 3, "analytic_corner_corpus: dimension must be 2 or 3");
  const int n = dim;
  const ScalarField y1 = coordinate(n, 0), y2 = coordinate(n, 1);
  const ScalarField y1y2 = product(y1, y2);
  std::vector<CornerSample> out = {
      {"y1*y2", y1y2},
      {"sin(pi*y1)*sin(pi*y2)", product(trig(n, 0, M_PI, false), trig(n, 1, M_PI, false))},
      {"y1*y2*exp(0.5*y1-0.3*y2)",
       product(y1y2, combine(1.0, exp_convexified(combine(0.5, y1, -0.3, y2), 1.0), 1.0,
                             constant_field(1.0)))},
      {"y1^3*y2", product(y1y2, square(y1))},
      {"sin(y1)*y2*cos(y2)", product(trig(n, 0, 1.0, false), product(y2, trig(n, 1, 1.0, true)))},
  };
  if (dim == 3) {
    const ScalarField w = combine(1.0, constant_field(1.0), 0.5, trig(n, 2, 2.0, false));
    for (auto& s : out) {
      s.name += "*(1+0.5*sin(2*y3))";
      s.u = product(s.u, w);
    }
  }
  return out;
}

std::map<std::string, double> fit_weak_constants(const std::vector<CornerSample>& corpus,
                                                 const std::vector<TestFunction>& tests, int dim,
                                                 int cells, double safety) {
  std::map<std::string, double> k;
  for (const auto& s : corpus) {
    const Lemma21Report rep = lemma21_residuals(CornerField::make(s.u, dim, cells), tests);
    for (const auto& [family, r] : rep.max_residual)
      k[family] = std::max(k[family], safety * r / (rep.h * rep.h));
  }
  return k;
}

}  // namespace ucp
