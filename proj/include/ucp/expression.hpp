#pragma once

#include "ucp/fields.hpp"

#include <memory>
#include <string>
#include <vector>

namespace ucp {

/// Value, gradient and Hessian of an expression at a point.
struct Jet {
  double v = 0.0;
  Vec g;
  Mat h;
};

struct ExprNode;

/// Closed-form scalar expression over the coordinates of R^n.
///
/// Grammar: numbers, + - * / ^, parentheses, the constant pi, functions
/// sqrt exp log sin cos tanh abs and norm(a, b, ...) = sqrt(a^2 + b^2 + ...).
/// Variables: x1..xn, and for the split x = (t, y1..yd): t, y1..yd; the
/// bare name y inside norm() expands to y1..yd.
class Expression {
 public:
  static Expression parse(const std::string& text, int dim);

  int dim() const { return dim_; }
  const std::string& text() const { return text_; }
  double value(const Point& x) const;
  Jet jet(const Point& x) const;
  /// ScalarField with analytic gradient and Hessian from the jet.
  ScalarField field() const;

 private:
  std::shared_ptr<const ExprNode> root_;
  std::string text_;
  int dim_ = 0;
};

}  // namespace ucp
