#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace rks {

// 17 significant digits: parses back to the identical double.
std::string format_double(double x);

// Minimal comma-separated writer. Fields never contain commas or quotes in
// this project's schemas, so no quoting is done.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::vector<std::string> header, bool write_header = true);

  template <class... Fields>
  void row(const Fields&... fields) {
    std::string line;
    bool first = true;
    ((append(line, first, fields)), ...);
    line += '\n';
    *out_ << line;
    out_->flush();
  }

  const std::vector<std::string>& header() const noexcept { return header_; }

 private:
  template <class T>
  static void append(std::string& line, bool& first, const T& value) {
    if (!first) line += ',';
    first = false;
    if constexpr (std::is_floating_point_v<T>)
      line += format_double(static_cast<double>(value));
    else if constexpr (std::is_integral_v<T>)
      line += std::to_string(value);
    else
      line += std::string_view(value);
  }

  std::ostream* out_;
  std::vector<std::string> header_;
};

// Whole-file table, read back for resume and for the fit subcommand.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of `name` in the header, or -1.
  int column(std::string_view name) const noexcept;
  double number(std::size_t row, std::string_view name) const;
  const std::string& text(std::size_t row, std::string_view name) const;
};

CsvTable read_csv(std::istream& in);
std::string join_header(const std::vector<std::string>& header);
double parse_double(const std::string& field);

}  // namespace rks
