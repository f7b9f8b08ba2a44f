#pragma once

#include "ucp/grid.hpp"

#include <functional>
#include <string>
#include <vector>

namespace ucp {

/// phi = exp(mu psi) - 1 built from a pseudo-convex psi.
struct WeightSpec {
  ScalarField psi;
  double mu = 1.0;
  ScalarField phi;
};

WeightSpec build_weight(const ScalarField& psi, double mu);

/// Lower-order part b(x) . d + c(x) of P. Empty callbacks mean zero.
struct LowerOrder {
  std::function<Vec(const Point&)> b;
  std::function<double(const Point&)> c;
};

/// P w = sum_jk Q_jk d_j d_k w + b . grad w + c w with centered second-order
/// differences; zero on the grid boundary (w is compactly supported).
GridFunction apply_operator(const MetricField& q, const LowerOrder& lower, const GridFunction& w);

/// Central-difference gradient, one grid function per axis, zero on the boundary.
std::vector<GridFunction> grid_gradient(const GridFunction& w);

struct CarlemanValue {
  double lhs = 0.0;   // |e^{-lambda phi} P w|
  double rhs1 = 0.0;  // lambda^{1/2} |e^{-lambda phi} grad w|
  double rhs2 = 0.0;  // lambda^{3/2} |e^{-lambda phi} w|
  double ratio = 0.0; // lhs / (rhs1 + rhs2); NaN when w vanishes
  bool empty = false;
  double weighted_w = 0.0;     // |e^{-lambda phi} w| before the lambda power
  double weighted_grad = 0.0;  // |e^{-lambda phi} grad w| before the lambda power
};

/// phi is shifted so its minimum over the support of w is zero; throws
/// RangeError when the weight still under/overflows.
CarlemanValue carleman_ratio(const MetricField& q, const LowerOrder& lower, const WeightSpec& weight,
                             const GridFunction& w, double lambda);

struct CarlemanRow {
  int testfn_id = 0;
  double lambda = 0.0;
  CarlemanValue value;
};

struct CarlemanReport {
  std::vector<CarlemanRow> rows;
  std::vector<double> lambdas;
  std::vector<double> r_min;  // per lambda
  std::vector<int> r_min_arg;
  /// Indices k where r_min decreases from lambdas[k-1] to lambdas[k].
  std::vector<int> decreasing;
  double mu = 0.0;
  double h = 0.0;
};

CarlemanReport lambda_sweep(const MetricField& q, const LowerOrder& lower, const WeightSpec& weight,
                            const std::vector<GridFunction>& corpus,
                            const std::vector<double>& lambdas);

/// Fixed-seed superpositions of at most five smooth bumps, each supported in
/// the middle `fill` fraction of the box.
std::vector<GridFunction> bump_corpus(const Box& box, int cells, int count,
                                      unsigned long long seed, double fill = 0.6);

}  // namespace ucp
