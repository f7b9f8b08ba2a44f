#pragma once

#include "ucp/hypothesis_checker.hpp"
#include "ucp/models.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ucp {

/// User-supplied geometry (strings kept for the report).
struct InlineGeometry {
  int dim = 0;
  std::string metric;  // diag(...), matrix(a, b; c, d), minkowski, conformal(amplitude)
  std::string phi_plus;
  std::string phi_minus;
  std::vector<double> box;  // lo1 hi1 lo2 hi2 ...
  std::vector<double> x0;
};

struct RunConfig {
  std::string command;  // check, certify, rays, corner, carleman, all
  std::optional<std::string> model;
  std::optional<InlineGeometry> geometry;
  std::optional<double> lambda;
  double mu = 1.0;
  std::optional<int> grid;
  std::optional<int> samples;
  unsigned long long seed = 42;
  std::string out = "ucp_out";
  Tolerances tol;
};

const std::vector<std::string>& commands();

/// Line-oriented key = value with [section] headers; '#' starts a comment.
/// Sections: [run], [geometry], [tolerances]. Throws ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Throws ConfigError for a missing or unknown command, positive-only
/// parameters out of range, or a missing geometry.
void validate(const RunConfig& cfg);

/// Named model or the inline geometry turned into a ModelSpec (name "inline").
ModelSpec resolve_model(const RunConfig& cfg);

}  // namespace ucp
