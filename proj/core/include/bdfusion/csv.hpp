#pragma once

#include "bdfusion/common.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace bdfusion::csv {

/// One parsed line; `line` is the 1-based line number in the source.
struct Row {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

struct Table {
  std::vector<std::string> header;
  std::vector<Row> rows;

  /// Index of `name` in the header, or -1.
  int column(std::string_view name) const;
  /// Like column() but throws IngestError when absent.
  int require_column(std::string_view name) const;
};

/// Plain comma-separated text: no quoting, blank lines skipped, trailing CR
/// stripped. Throws IngestError on an empty input.
Table read(std::istream& in);
Table read_file(const std::filesystem::path& path);

/// Strict decimal parse of the whole field. Throws IngestError naming the
/// line on junk or on NaN/Inf.
double parse_real(std::string_view field, std::size_t line);
long long parse_int(std::string_view field, std::size_t line);

/// Shortest round-trip text for a double.
std::string format_real(double v);

std::string join(const std::vector<std::string>& parts, char sep = ',');
std::vector<std::string> split(std::string_view s, char sep = ',');

}  // namespace bdfusion::csv
