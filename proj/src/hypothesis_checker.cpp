#include "ucp/hypothesis_checker.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace ucp {

void GeometrySpec::validate() const {
  require(q.dim() >= 2, "GeometrySpec: metric missing");
  require(phi_plus.valid() && phi_minus.valid(), "GeometrySpec: phi+ / phi- missing");
  require(box.valid() && box.dim() == q.dim(), "GeometrySpec: box empty or of wrong dimension");
  require(n_surface_samples >= 1, "GeometrySpec: n_surface_samples must be >= 1");
  require(tol.zero > 0 && tol.chr > 0 && tol.pos > 0 && tol.id > 0,
          "GeometrySpec: tolerances must be positive");
}

namespace {

bool finite(const Vec& v) { return v.allFinite(); }

int default_resolution(int n) {
  switch (n) {
    case 2: return 256;
    case 3: return 48;
    case 4: return 20;
    default: return 10;
  }
}

// Newton projection onto {f = 0} along grad f.
std::optional<Point> project_single(const ScalarField& f, Point x, double tol) {
  for (int it = 0; it < 20; ++it) {
    const double v = f(x);
    if (!std::isfinite(v)) return std::nullopt;
    if (std::abs(v) <= tol) return x;
    const Vec g = f.gradient(x);
    const double g2 = g.squaredNorm();
    if (!finite(g) || g2 < 1e-24) return std::nullopt;
    x -= (v / g2) * g;
  }
  if (std::abs(f(x)) <= tol) return x;
  return std::nullopt;
}

// Minimum-norm Newton steps on the two-equation system (phi+, phi-).
std::optional<Point> project_pair(const ScalarField& f, const ScalarField& g, Point x, double tol) {
  for (int it = 0; it < 20; ++it) {
    Vec r(2);
    r << f(x), g(x);
    if (!finite(r)) return std::nullopt;
    if (r.cwiseAbs().maxCoeff() <= tol) return x;
    Mat jac(2, x.size());
    jac.row(0) = f.gradient(x).transpose();
    jac.row(1) = g.gradient(x).transpose();
    if (!finite(jac.reshaped())) return std::nullopt;
    Eigen::CompleteOrthogonalDecomposition<Mat> cod(jac);
    cod.setThreshold(1e-10);
    x -= cod.solve(r);
  }
  if (std::max(std::abs(f(x)), std::abs(g(x))) <= tol) return x;
  return std::nullopt;
}

// Sign-change edges of f on a cell-centered grid, linearly interpolated.
std::vector<Point> sign_change_seeds(const ScalarField& f, const Box& box, int m) {
  const int n = box.dim();
  const Vec step = (box.hi - box.lo) / m;
  long total = 1;
  for (int k = 0; k < n; ++k) total *= m;
  std::vector<double> vals(total);
  std::vector<int> idx(n);
  auto node = [&](long flat) {
    Point x(n);
    for (int k = n - 1; k >= 0; --k) {
      idx[k] = static_cast<int>(flat % m);
      flat /= m;
    }
    for (int k = 0; k < n; ++k) x[k] = box.lo[k] + (idx[k] + 0.5) * step[k];
    return x;
  };
  for (long i = 0; i < total; ++i) vals[i] = f(node(i));

  std::vector<Point> seeds;
  long stride = 1;
  for (int k = n - 1; k >= 0; --k) {
    for (long i = 0; i < total; ++i) {
      const int ik = static_cast<int>((i / stride) % m);
      if (ik + 1 >= m) continue;
      const double a = vals[i], b = vals[i + stride];
      if (!std::isfinite(a) || !std::isfinite(b)) continue;
      if ((a <= 0.0) == (b <= 0.0)) continue;
      const Point xa = node(i);
      const double s = a / (a - b);
      Point x = xa;
      x[k] += s * step[k];
      seeds.push_back(x);
    }
    stride *= m;
  }
  return seeds;
}

std::vector<Point> thin(std::vector<Point> pts, int n) {
  if (static_cast<int>(pts.size()) <= n) return pts;
  std::vector<Point> out;
  out.reserve(n);
  const double c = static_cast<double>(pts.size());
  for (int k = 0; k < n; ++k) out.push_back(pts[static_cast<size_t>(std::floor(k * c / n))]);
  return out;
}

std::vector<Point> dedupe(const std::vector<Point>& pts, double eps) {
  std::vector<Point> out;
  for (const auto& p : pts) {
    bool dup = false;
    // Only recent neighbours are compared; seeds arrive in scan order.
    for (size_t j = out.size() > 64 ? out.size() - 64 : 0; j < out.size(); ++j)
      if ((out[j] - p).norm() < eps) {
        dup = true;
        break;
      }
    if (!dup) out.push_back(p);
  }
  return out;
}

double smallest_singular_value(const Vec& a, const Vec& b) {
  Mat m(2, a.size());
  m.row(0) = a.transpose();
  m.row(1) = b.transpose();
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()[1];
}

}  // namespace

SurfaceSampling sample_surface(const GeometrySpec& spec, SurfaceKind which) {
  spec.validate();
  const int m = spec.grid_resolution > 0 ? spec.grid_resolution : default_resolution(spec.dim());
  const double tol = spec.tol.zero;
  const double scale = (spec.box.hi - spec.box.lo).norm();
  const ScalarField& primary = which == SurfaceKind::minus ? spec.phi_minus : spec.phi_plus;

  SurfaceSampling out;
  std::vector<Point> found;
  for (const auto& seed : sign_change_seeds(primary, spec.box, m)) {
    std::optional<Point> x = project_single(primary, seed, tol);
    if (x && which == SurfaceKind::intersection)
      x = project_pair(spec.phi_plus, spec.phi_minus, *x, tol);
    if (!x || !spec.box.contains(*x)) {
      ++out.discarded;
      continue;
    }
    found.push_back(*x);
  }
  found = dedupe(found, 1e-9 * scale);
  out.candidates = static_cast<int>(found.size());
  out.points = thin(std::move(found), spec.n_surface_samples);
  out.shortfall = std::max(0, spec.n_surface_samples - static_cast<int>(out.points.size()));
  return out;
}

//--------------------------------------------------------------------------------------------------

bool HypothesisReport::all_pass() const {
  for (const auto& [name, r] : checks)
    if (!r.pass) return false;
  return !checks.empty();
}

std::vector<std::string> HypothesisReport::failed() const {
  std::vector<std::string> out;
  for (const auto& [name, r] : checks)
    if (!r.pass) out.push_back(name);
  return out;
}

HypothesisReport check_assumptions(const GeometrySpec& spec) {
  spec.validate();
  const auto plus = sample_surface(spec, SurfaceKind::plus).points;
  const auto minus = sample_surface(spec, SurfaceKind::minus).points;
  const auto inter = sample_surface(spec, SurfaceKind::intersection).points;
  if (plus.empty() || minus.empty() || inter.empty())
    throw InsufficientSamples("check_assumptions: a surface sample set is empty (plus=" +
                              std::to_string(plus.size()) + ", minus=" +
                              std::to_string(minus.size()) + ", intersection=" +
                              std::to_string(inter.size()) + ")");
  const Tolerances& tol = spec.tol;
  HypothesisReport rep;

  {
    AssumptionResult r;
    r.margin = std::numeric_limits<double>::infinity();
    auto scan = [&](const ScalarField& f, const std::vector<Point>& pts, const char* name) {
      for (const auto& x : pts) {
        const double g = f.gradient(x).norm();
        if (g < r.margin) {
          r.margin = g;
          r.witness = x;
          r.detail = name;
        }
      }
      r.n_points += static_cast<int>(pts.size());
    };
    scan(spec.phi_plus, plus, "plus");
    scan(spec.phi_minus, minus, "minus");
    r.pass = r.margin > tol.pos;
    rep.checks["manifold"] = r;
  }
  {
    AssumptionResult r;
    r.margin = std::numeric_limits<double>::infinity();
    for (const auto& x : inter) {
      const Vec a = spec.phi_plus.gradient(x), b = spec.phi_minus.gradient(x);
      const double s = smallest_singular_value(a / a.norm(), b / b.norm());
      if (!(s >= r.margin)) {
        r.margin = s;
        r.witness = x;
      }
    }
    r.n_points = static_cast<int>(inter.size());
    r.pass = r.margin > tol.pos;
    rep.checks["transverse"] = r;
  }
  {
    AssumptionResult r;
    r.margin = 0.0;
    auto scan = [&](const ScalarField& f, const std::vector<Point>& pts, const char* name) {
      for (const auto& x : pts) {
        Vec g = f.gradient(x);
        g /= g.norm();
        const double v = std::abs(g.dot(spec.q(x) * g));
        if (!(v <= r.margin)) {
          r.margin = v;
          r.witness = x;
          r.detail = name;
        }
      }
      r.n_points += static_cast<int>(pts.size());
    };
    scan(spec.phi_plus, plus, "plus");
    scan(spec.phi_minus, minus, "minus");
    r.pass = r.margin <= tol.chr;
    rep.checks["bothcar"] = r;
  }
  {
    AssumptionResult r;
    r.margin = std::numeric_limits<double>::infinity();
    for (const auto& x : inter) {
      const double v = spec.phi_plus.gradient(x).dot(spec.q(x) * spec.phi_minus.gradient(x));
      r.values.push_back(v);
      if (!(v >= r.margin)) {
        r.margin = v;
        r.witness = x;
      }
    }
    r.n_points = static_cast<int>(inter.size());
    r.pass = r.margin > tol.pos;
    rep.checks["sign"] = r;
  }
  return rep;
}

std::pair<ScalarField, ScalarField> build_psi(const GeometrySpec& spec) {
  ScalarField psi1 = combine(0.5, spec.phi_plus, 0.5, spec.phi_minus);
  ScalarField psi0 = combine(-0.5, spec.phi_plus, 0.5, spec.phi_minus);
  return {psi0, psi1};
}

Lemma26Report verify_lemma26(const GeometrySpec& spec) {
  const auto inter = sample_surface(spec, SurfaceKind::intersection).points;
  if (inter.empty()) throw InsufficientSamples("verify_lemma26: no intersection samples");
  const auto [psi0, psi1] = build_psi(spec);
  Lemma26Report rep;
  rep.min_q11 = std::numeric_limits<double>::infinity();
  rep.max_q00 = -std::numeric_limits<double>::infinity();
  rep.pass = true;
  for (const auto& x : inter) {
    const Mat q = spec.q(x);
    const Vec d1 = psi1.gradient(x), d0 = psi0.gradient(x);
    const double q11 = d1.dot(q * d1), q00 = d0.dot(q * d0), q10 = d1.dot(q * d0);
    rep.min_q11 = std::min(rep.min_q11, q11);
    rep.max_q00 = std::max(rep.max_q00, q00);
    rep.max_sum = std::max(rep.max_sum, std::abs(q11 + q00));
    rep.max_cross = std::max(rep.max_cross, std::abs(q10));
    const bool ok = q11 > spec.tol.pos && q00 < -spec.tol.pos &&
                    std::abs(q11 + q00) <= spec.tol.id && std::abs(q10) <= spec.tol.id;
    if (!ok && rep.pass) {
      rep.pass = false;
      rep.witness = x;
    }
  }
  rep.n_points = static_cast<int>(inter.size());
  return rep;
}

InclusionReport verify_inclusion(const GeometrySpec& spec, double lambda, double radius,
                                 int n_samples, unsigned long long seed) {
  require(lambda > 0.0, "verify_inclusion: lambda must be positive");
  require(radius > 0.0 && n_samples >= 1, "verify_inclusion: radius and n_samples must be positive");
  const auto inter = sample_surface(spec, SurfaceKind::intersection).points;
  if (inter.empty()) throw InsufficientSamples("verify_inclusion: no intersection samples");
  const auto [psi0, psi1] = build_psi(spec);
  const int n = spec.dim();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif;

  InclusionReport rep;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  rep.radius_exceeds_bound = radius > 1.0 / lambda;
  const long max_attempts = 200L * n_samples;
  for (long attempt = 0; attempt < max_attempts && rep.n_samples < n_samples; ++attempt) {
    const Point& base = inter[attempt % inter.size()];
    Vec dir(n);
    for (int k = 0; k < n; ++k) dir[k] = normal(rng);
    dir.normalize();
    const Point x = base + radius * std::pow(unif(rng), 1.0 / n) * dir;
    if (!spec.box.contains(x)) continue;
    if (!(spec.phi_plus(x) > 0.0 && spec.phi_minus(x) > 0.0)) continue;
    const double p0 = psi0(x);
    const double margin = psi1(x) - lambda * p0 * p0;
    ++rep.n_samples;
    if (margin < rep.worst_margin) {
      rep.worst_margin = margin;
      rep.witness = x;
    }
  }
  if (rep.n_samples == 0) throw InsufficientSamples("verify_inclusion: no points of Omega found");
  rep.holds = rep.worst_margin > 0.0;
  return rep;
}

}  // namespace ucp
