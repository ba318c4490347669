#pragma once

#include <fstream>
#include <span>
#include <string>
#include <vector>

namespace splinewalk {

// 17 significant digits: round-trips any binary64 exactly.
std::string csv_num(double v);
std::string csv_num(long long v);
inline std::string csv_num(long v) { return csv_num(static_cast<long long>(v)); }
inline std::string csv_num(int v) { return csv_num(static_cast<long long>(v)); }

// RFC 4180 quoting, applied only when needed.
std::string csv_field(const std::string& s);

// Line-oriented CSV writer. Files begin with '#' comment lines (tool
// version, resolved spec, master seed) written by the caller.
class CsvFile {
 public:
  explicit CsvFile(const std::string& path);  // throws std::runtime_error

  void comment(const std::string& text);
  void row(std::span<const std::string> fields);
  void row(std::initializer_list<std::string> fields);

 private:
  std::ofstream out_;
};

}  // namespace splinewalk
