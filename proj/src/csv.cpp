#include "splinewalk/csv.hpp"

#include <cstdio>
#include <stdexcept>

namespace splinewalk {

std::string csv_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string csv_num(long long v) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%lld", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  const bool needs_quote =
      s.find_first_of(",\"\n\r") != std::string::npos;
  if (!needs_quote) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

CsvFile::CsvFile(const std::string& path) : out_(path, std::ios::binary) {
  if (!out_) throw std::runtime_error("cannot open output file: " + path);
}

void CsvFile::comment(const std::string& text) {
  out_ << "# " << text << "\n";
  if (!out_) throw std::runtime_error("write failure on CSV output");
}

void CsvFile::row(std::span<const std::string> fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    out_ << csv_field(fields[i]);
  }
  out_ << '\n';
  if (!out_) throw std::runtime_error("write failure on CSV output");
}

void CsvFile::row(std::initializer_list<std::string> fields) {
  row(std::span<const std::string>(fields.begin(), fields.size()));
}

}  // namespace splinewalk
