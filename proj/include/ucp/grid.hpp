#pragma once

#include "ucp/fields.hpp"

#include <array>
#include <functional>
#include <vector>

namespace ucp {

/// Uniform tensor grid on a box with `cells` intervals per axis (cells + 1
/// nodes per axis, endpoints included). Values are stored with the last axis
/// varying fastest.
class GridFunction {
 public:
  GridFunction() = default;
  GridFunction(Box box, int cells);
  /// Grid covering (-1, 1)^dim.
  static GridFunction unit(int dim, int cells);
  static GridFunction sample(Box box, int cells, const std::function<double(const Point&)>& f);

  int dim() const { return box_.dim(); }
  int cells() const { return cells_; }
  int nodes_per_axis() const { return cells_ + 1; }
  long size() const { return static_cast<long>(values_.size()); }
  const Box& box() const { return box_; }
  double spacing(int axis) const { return (box_.hi[axis] - box_.lo[axis]) / cells_; }
  double cell_volume() const;

  double coord(int axis, int i) const { return box_.lo[axis] + i * spacing(axis); }
  Point node(long flat) const;
  void unflatten(long flat, std::vector<int>& idx) const;
  long flatten(const std::vector<int>& idx) const;
  long stride(int axis) const;

  double& operator[](long i) { return values_[i]; }
  double operator[](long i) const { return values_[i]; }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  /// Trapezoid quadrature of the stored values over the whole box.
  double integrate() const;
  double l2_norm() const;
  bool finite() const;

 private:
  Box box_;
  int cells_ = 0;
  std::vector<double> values_;
};

/// exp(-1 / (1 - u^2)) on |u| < 1 and its first two derivatives.
std::array<double, 3> bump1d(double u);

/// Separable smooth test function prod_k b((y_k - c_k) / r_k), compactly
/// supported in the box prod_k [c_k - r_k, c_k + r_k].
struct TestFunction {
  Vec center;
  Vec radius;

  int dim() const { return static_cast<int>(center.size()); }
  /// Derivative along each axis of the given orders (each 0, 1 or 2).
  double derivative(const std::vector<int>& alpha, const Point& y) const;
  double operator()(const Point& y) const { return derivative(std::vector<int>(dim(), 0), y); }
  /// Factor for one axis: d^order/dy^order of b((y - c) / r).
  double factor(int axis, int order, double y) const;
};

/// Fixed-seed corpus of test functions supported inside [-1 + margin, 1 - margin]^dim.
std::vector<TestFunction> test_function_corpus(int dim, int count, unsigned long long seed,
                                               double margin = 0.05);

}  // namespace ucp
