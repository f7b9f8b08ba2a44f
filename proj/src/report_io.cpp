#include "ucp/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace ucp {

void write_atomic(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw UcpError("IoError", "cannot open " + tmp.string());
    f << contents;
    if (!f.flush()) throw UcpError("IoError", "write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

Json to_json(const Vec& v) {
  Json a = Json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(number(v[i]));
  return a;
}

Json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add(const std::vector<double>& row) { add({}, row); }

void CsvTable::add(const std::vector<std::string>& text, const std::vector<double>& row) {
  require(text.size() + row.size() == header_.size(), "CsvTable: row width mismatch");
  std::string line;
  size_t cell = 0;
  for (const auto& t : text) line += (cell++ ? "," : "") + t;
  for (double v : row) line += (cell++ ? "," : "") + format_number(v);
  rows_.push_back(std::move(line));
}

std::string CsvTable::str() const {
  std::string out;
  for (size_t i = 0; i < header_.size(); ++i) out += (i ? "," : "") + header_[i];
  out += "\n";
  for (const auto& r : rows_) out += r + "\n";
  return out;
}

}  // namespace ucp
