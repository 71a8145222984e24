#include "rks/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "rks/error.hpp"

namespace rks {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_double(const std::string& field) {
  double v = 0.0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc{} || ptr != end) throw IoError("malformed number '" + field + "'");
  return v;
}

CsvWriter::CsvWriter(std::ostream& out, std::vector<std::string> header, bool write_header)
    : out_(&out), header_(std::move(header)) {
  if (write_header) {
    *out_ << join_header(header_) << '\n';
    out_->flush();
  }
}

std::string join_header(const std::vector<std::string>& header) {
  std::string line;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) line += ',';
    line += header[i];
  }
  return line;
}

int CsvTable::column(std::string_view name) const noexcept {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

const std::string& CsvTable::text(std::size_t row, std::string_view name) const {
  const int c = column(name);
  if (c < 0) throw IoError("CSV has no column '" + std::string(name) + "'");
  return rows.at(row).at(static_cast<std::size_t>(c));
}

double CsvTable::number(std::size_t row, std::string_view name) const { return parse_double(text(row, name)); }

CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  auto split = [](const std::string& l) {
    std::vector<std::string> fields;
    std::stringstream ss(l);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (!l.empty() && l.back() == ',') fields.emplace_back();
    return fields;
  };
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::string content = buffer.str();
  // A torn final line from an interrupted run (no trailing newline) is dropped.
  if (const auto last = content.rfind('\n'); last == std::string::npos)
    content.clear();
  else
    content.resize(last + 1);
  std::stringstream lines(content);
  if (!std::getline(lines, line)) return t;
  t.header = split(line);
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    auto fields = split(line);
    if (fields.size() != t.header.size()) throw IoError("CSV row has " + std::to_string(fields.size()) + " fields, header has " + std::to_string(t.header.size()));
    t.rows.push_back(std::move(fields));
  }
  return t;
}

}  // namespace rks
