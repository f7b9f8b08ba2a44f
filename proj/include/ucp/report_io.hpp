#pragma once

#include "ucp/types.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace ucp {

using Json = nlohmann::json;

inline constexpr const char* kReportSchema = "ucp-report/1";

/// Writes to path + ".tmp" and renames over path.
void write_atomic(const std::string& path, const std::string& contents);

Json to_json(const Vec& v);
/// NaN and infinities become null.
Json number(double v);

/// Minimal CSV table with full-precision numbers.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  void add(const std::vector<double>& row);
  /// Row whose first cells are text (e.g. ids or family names).
  void add(const std::vector<std::string>& text, const std::vector<double>& row);
  std::string str() const;
  size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::string> rows_;
};

std::string format_number(double v);

}  // namespace ucp
