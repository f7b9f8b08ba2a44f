#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace ucp {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Points live in R^n, covectors in its dual; both are stored as plain
// column vectors and the distinction is kept by naming.
using Point = Vec;
using Covector = Vec;

//--------------------------------------------------------------------------------------------------
// Error taxonomy. Every error carries a short machine-readable kind so the
// driver can surface it in reports without string matching.

class UcpError : public std::runtime_error {
 public:
  UcpError(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define UCP_DEFINE_ERROR(Name)                                        \
  class Name : public UcpError {                                      \
   public:                                                            \
    explicit Name(const std::string& what) : UcpError(#Name, what) {} \
  }

UCP_DEFINE_ERROR(ContractViolation);
UCP_DEFINE_ERROR(SignatureError);
UCP_DEFINE_ERROR(ChartError);
UCP_DEFINE_ERROR(InsufficientSamples);
UCP_DEFINE_ERROR(DegenerateConstraintSet);
UCP_DEFINE_ERROR(NondegeneracyViolation);
UCP_DEFINE_ERROR(InternalInconsistency);
UCP_DEFINE_ERROR(FitError);
UCP_DEFINE_ERROR(SupportError);
UCP_DEFINE_ERROR(HypothesisError);
UCP_DEFINE_ERROR(ResolutionError);
UCP_DEFINE_ERROR(RangeError);
UCP_DEFINE_ERROR(ConfigError);

#undef UCP_DEFINE_ERROR

inline void require(bool cond, const std::string& what) {
  if (!cond) throw ContractViolation(what);
}

/// Axis-aligned box [lo, hi] in R^n.
struct Box {
  Vec lo;
  Vec hi;

  int dim() const { return static_cast<int>(lo.size()); }
  bool contains(const Point& x, double slack = 0.0) const {
    for (int i = 0; i < dim(); ++i)
      if (x[i] < lo[i] - slack || x[i] > hi[i] + slack) return false;
    return true;
  }
  bool valid() const {
    if (lo.size() != hi.size() || lo.size() == 0) return false;
    return ((hi - lo).array() > 0.0).all();
  }
};

}  // namespace ucp
