#include "ucp/carleman_lab.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace ucp {

WeightSpec build_weight(const ScalarField& psi, double mu) {
  require(mu > 0.0, "build_weight: mu must be positive");
  require(psi.valid(), "build_weight: psi undefined");
  return WeightSpec{psi, mu, exp_convexified(psi, mu)};
}

namespace {

bool on_boundary(const std::vector<int>& idx, int cells) {
  for (int i : idx)
    if (i == 0 || i == cells) return true;
  return false;
}

}  // namespace

GridFunction apply_operator(const MetricField& q, const LowerOrder& lower, const GridFunction& w) {
  const int n = w.dim();
  require(q.dim() == n, "apply_operator: metric dimension mismatch");
  GridFunction out(w.box(), w.cells());
  std::vector<int> idx;
  for (long i = 0; i < w.size(); ++i) {
    w.unflatten(i, idx);
    if (on_boundary(idx, w.cells())) continue;
    const Point x = w.node(i);
    const Mat qm = q(x);
    double acc = 0.0;
    Vec grad(n);
    for (int j = 0; j < n; ++j) {
      const long sj = w.stride(j);
      const double hj = w.spacing(j);
      grad[j] = (w[i + sj] - w[i - sj]) / (2.0 * hj);
      acc += qm(j, j) * (w[i + sj] - 2.0 * w[i] + w[i - sj]) / (hj * hj);
      for (int k = j + 1; k < n; ++k) {
        const long sk = w.stride(k);
        const double mixed =
            (w[i + sj + sk] - w[i + sj - sk] - w[i - sj + sk] + w[i - sj - sk]) /
            (4.0 * hj * w.spacing(k));
        acc += 2.0 * qm(j, k) * mixed;
      }
    }
    if (lower.b) acc += lower.b(x).dot(grad);
    if (lower.c) acc += lower.c(x) * w[i];
    out[i] = acc;
  }
  return out;
}

std::vector<GridFunction> grid_gradient(const GridFunction& w) {
  std::vector<GridFunction> g(w.dim(), GridFunction(w.box(), w.cells()));
  std::vector<int> idx;
  for (long i = 0; i < w.size(); ++i) {
    w.unflatten(i, idx);
    for (int k = 0; k < w.dim(); ++k) {
      if (idx[k] == 0 || idx[k] == w.cells()) continue;
      const long s = w.stride(k);
      g[k][i] = (w[i + s] - w[i - s]) / (2.0 * w.spacing(k));
    }
  }
  return g;
}

namespace {

// Everything lambda-independent for one test function.
struct Prepared {
  const GridFunction* w = nullptr;
  GridFunction pw;
  std::vector<double> grad2;  // |grad w|^2 per node
  std::vector<double> phi;    // unshifted weight per node
  std::vector<char> active;   // nodes where w, P w or grad w are nonzero
  double phi_min = 0.0;       // over the support of w
  bool empty = true;
};

Prepared prepare(const MetricField& q, const LowerOrder& lower, const WeightSpec& weight,
                 const GridFunction& w) {
  Prepared p;
  p.w = &w;
  p.pw = apply_operator(q, lower, w);
  const auto grad = grid_gradient(w);
  p.grad2.assign(w.size(), 0.0);
  p.phi.assign(w.size(), 0.0);
  p.active.assign(w.size(), 0);
  p.phi_min = std::numeric_limits<double>::infinity();
  for (long i = 0; i < w.size(); ++i) {
    double g2 = 0.0;
    for (const auto& g : grad) g2 += g[i] * g[i];
    p.grad2[i] = g2;
    if (w[i] == 0.0 && p.pw[i] == 0.0 && g2 == 0.0) continue;
    p.active[i] = 1;
    p.phi[i] = weight.phi(w.node(i));
    if (w[i] != 0.0) {
      p.empty = false;
      p.phi_min = std::min(p.phi_min, p.phi[i]);
    }
  }
  return p;
}

CarlemanValue evaluate(const Prepared& p, double lambda) {
  require(lambda > 0.0, "carleman_ratio: lambda must be positive");
  CarlemanValue v;
  if (p.empty) {
    v.empty = true;
    v.ratio = std::numeric_limits<double>::quiet_NaN();
    return v;
  }
  const GridFunction& w = *p.w;
  double s_pw = 0.0, s_g = 0.0, s_w = 0.0;
  for (long i = 0; i < w.size(); ++i) {
    if (!p.active[i]) continue;
    const double expo = -2.0 * lambda * (p.phi[i] - p.phi_min);
    if (expo > 700.0) throw RangeError("carleman_ratio: weight overflows at lambda = " +
                                       std::to_string(lambda));
    const double e = std::exp(expo);
    s_pw += e * p.pw[i] * p.pw[i];
    s_g += e * p.grad2[i];
    s_w += e * w[i] * w[i];
  }
  const double vol = w.cell_volume();
  if (!(s_w > 0.0)) throw RangeError("carleman_ratio: weight underflows on the support of w");
  v.lhs = std::sqrt(s_pw * vol);
  v.weighted_grad = std::sqrt(s_g * vol);
  v.weighted_w = std::sqrt(s_w * vol);
  v.rhs1 = std::sqrt(lambda) * v.weighted_grad;
  v.rhs2 = lambda * std::sqrt(lambda) * v.weighted_w;
  v.ratio = v.lhs / (v.rhs1 + v.rhs2);
  return v;
}

}  // namespace

CarlemanValue carleman_ratio(const MetricField& q, const LowerOrder& lower, const WeightSpec& weight,
                             const GridFunction& w, double lambda) {
  return evaluate(prepare(q, lower, weight, w), lambda);
}

CarlemanReport lambda_sweep(const MetricField& q, const LowerOrder& lower, const WeightSpec& weight,
                            const std::vector<GridFunction>& corpus,
                            const std::vector<double>& lambdas) {
  require(!corpus.empty(), "lambda_sweep: empty corpus");
  require(!lambdas.empty(), "lambda_sweep: no lambda values");
  for (size_t k = 1; k < lambdas.size(); ++k)
    require(lambdas[k] > lambdas[k - 1], "lambda_sweep: lambdas must be strictly increasing");
  CarlemanReport rep;
  rep.lambdas = lambdas;
  rep.mu = weight.mu;
  rep.h = corpus.front().spacing(0);
  rep.r_min.assign(lambdas.size(), std::numeric_limits<double>::infinity());
  rep.r_min_arg.assign(lambdas.size(), -1);
  for (size_t t = 0; t < corpus.size(); ++t) {
    const Prepared p = prepare(q, lower, weight, corpus[t]);
    for (size_t k = 0; k < lambdas.size(); ++k) {
      CarlemanRow row{static_cast<int>(t), lambdas[k], evaluate(p, lambdas[k])};
      if (!row.value.empty && row.value.ratio < rep.r_min[k]) {
        rep.r_min[k] = row.value.ratio;
        rep.r_min_arg[k] = static_cast<int>(t);
      }
      rep.rows.push_back(row);
    }
  }
  for (size_t k = 1; k < lambdas.size(); ++k)
    if (rep.r_min[k] < rep.r_min[k - 1]) rep.decreasing.push_back(static_cast<int>(k));
  return rep;
}

std::vector<GridFunction> bump_corpus(const Box& box, int cells, int count,
                                      unsigned long long seed, double fill) {
  require(fill > 0.0 && fill < 1.0, "bump_corpus: fill must lie in (0, 1)");
  const int n = box.dim();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> how_many(1, 5);
  const Vec mid = 0.5 * (box.lo + box.hi);
  const Vec half = 0.5 * fill * (box.hi - box.lo);

  std::vector<GridFunction> out;
  for (int t = 0; t < count; ++t) {
    std::vector<TestFunction> bumps;
    std::vector<double> amp;
    const int m = how_many(rng);
    for (int b = 0; b < m; ++b) {
      TestFunction f{Vec(n), Vec(n)};
      for (int k = 0; k < n; ++k) {
        const double r = half[k] * (0.25 + 0.5 * unit(rng));
        const double room = half[k] - r;
        f.radius[k] = r;
        f.center[k] = mid[k] + room * (2.0 * unit(rng) - 1.0);
      }
      bumps.push_back(f);
      amp.push_back((unit(rng) < 0.5 ? -1.0 : 1.0) * (0.5 + unit(rng)));
    }
    out.push_back(GridFunction::sample(box, cells, [&](const Point& x) {
      double s = 0.0;
      for (size_t b = 0; b < bumps.size(); ++b) s += amp[b] * bumps[b](x);
      return s;
    }));
  }
  return out;
}

}  // namespace ucp
