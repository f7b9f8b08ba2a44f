#include "ucp/grid.hpp"

#include <cmath>
#include <random>

namespace ucp {

GridFunction::GridFunction(Box box, int cells) : box_(std::move(box)), cells_(cells) {
  require(box_.valid(), "GridFunction: invalid box");
  require(cells_ >= 2, "GridFunction: need at least two cells per axis");
  long total = 1;
  for (int k = 0; k < dim(); ++k) total *= nodes_per_axis();
  values_.assign(total, 0.0);
}

GridFunction GridFunction::unit(int dim, int cells) {
  require(dim >= 1, "GridFunction::unit: dimension must be positive");
  return GridFunction(Box{Vec::Constant(dim, -1.0), Vec::Constant(dim, 1.0)}, cells);
}

GridFunction GridFunction::sample(Box box, int cells, const std::function<double(const Point&)>& f) {
  GridFunction g(std::move(box), cells);
  for (long i = 0; i < g.size(); ++i) g.values_[i] = f(g.node(i));
  return g;
}

double GridFunction::cell_volume() const {
  double v = 1.0;
  for (int k = 0; k < dim(); ++k) v *= spacing(k);
  return v;
}

long GridFunction::stride(int axis) const {
  long s = 1;
  for (int k = dim() - 1; k > axis; --k) s *= nodes_per_axis();
  return s;
}

void GridFunction::unflatten(long flat, std::vector<int>& idx) const {
  idx.resize(dim());
  const int m = nodes_per_axis();
  for (int k = dim() - 1; k >= 0; --k) {
    idx[k] = static_cast<int>(flat % m);
    flat /= m;
  }
}

long GridFunction::flatten(const std::vector<int>& idx) const {
  long flat = 0;
  for (int k = 0; k < dim(); ++k) flat = flat * nodes_per_axis() + idx[k];
  return flat;
}

Point GridFunction::node(long flat) const {
  std::vector<int> idx;
  unflatten(flat, idx);
  Point x(dim());
  for (int k = 0; k < dim(); ++k) x[k] = coord(k, idx[k]);
  return x;
}

double GridFunction::integrate() const {
  std::vector<int> idx;
  double acc = 0.0;
  for (long i = 0; i < size(); ++i) {
    unflatten(i, idx);
    double w = 1.0;
    for (int k = 0; k < dim(); ++k)
      if (idx[k] == 0 || idx[k] == cells_) w *= 0.5;
    acc += w * values_[i];
  }
  return acc * cell_volume();
}

double GridFunction::l2_norm() const {
  double acc = 0.0;
  for (double v : values_) acc += v * v;
  return std::sqrt(acc * cell_volume());
}

bool GridFunction::finite() const {
  for (double v : values_)
    if (!std::isfinite(v)) return false;
  return true;
}

//--------------------------------------------------------------------------------------------------

std::array<double, 3> bump1d(double u) {
  if (!(std::abs(u) < 1.0)) return {0.0, 0.0, 0.0};
  const double s = 1.0 - u * u;
  const double b = std::exp(-1.0 / s);
  const double g1 = -2.0 * u / (s * s);
  const double g2 = -2.0 * (1.0 + 3.0 * u * u) / (s * s * s);
  return {b, g1 * b, (g2 + g1 * g1) * b};
}

double TestFunction::factor(int axis, int order, double y) const {
  const double r = radius[axis];
  const auto b = bump1d((y - center[axis]) / r);
  return b[order] / std::pow(r, order);
}

double TestFunction::derivative(const std::vector<int>& alpha, const Point& y) const {
  double v = 1.0;
  for (int k = 0; k < dim(); ++k) {
    v *= factor(k, alpha[k], y[k]);
    if (v == 0.0) return 0.0;
  }
  return v;
}

std::vector<TestFunction> test_function_corpus(int dim, int count, unsigned long long seed,
                                               double margin) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> center(-0.45, 0.45);
  std::uniform_real_distribution<double> radius(0.2, 0.5);
  std::vector<TestFunction> out;
  for (int i = 0; i < count; ++i) {
    TestFunction t{Vec(dim), Vec(dim)};
    for (int k = 0; k < dim; ++k) {
      t.center[k] = center(rng);
      const double room = 1.0 - margin - std::abs(t.center[k]);
      t.radius[k] = std::min(radius(rng), room);
    }
    out.push_back(t);
  }
  return out;
}

}  // namespace ucp
