#include "bdfusion/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>

namespace bdfusion::csv {

int Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

int Table::require_column(std::string_view name) const {
  int c = column(name);
  if (c < 0) throw IngestError("missing column '" + std::string(name) + "'");
  return c;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(s.substr(start));
      break;
    }
    out.emplace_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out.push_back(sep);
    out += parts[i];
  }
  return out;
}

Table read(std::istream& in) {
  Table t;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    if (line.empty()) continue;
    auto fields = split(line);
    if (!have_header) {
      t.header = std::move(fields);
      have_header = true;
    } else {
      t.rows.push_back(Row{lineno, std::move(fields)});
    }
  }
  if (!have_header) throw IngestError("empty input: no header row");
  return t;
}

Table read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError("cannot open '" + path.string() + "'");
  try {
    return read(in);
  } catch (const IngestError& e) {
    throw IngestError(path.string() + ": " + e.what());
  }
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

double parse_real(std::string_view field, std::size_t line) {
  auto f = trim(field);
  if (!f.empty() && f.front() == '+') f.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
  if (f.empty() || ec != std::errc() || ptr != f.data() + f.size()) {
    throw IngestError("line " + std::to_string(line) + ": non-numeric value '" + std::string(field) + "'");
  }
  if (!std::isfinite(v)) {
    throw IngestError("line " + std::to_string(line) + ": non-finite value '" + std::string(field) + "'");
  }
  return v;
}

long long parse_int(std::string_view field, std::size_t line) {
  auto f = trim(field);
  long long v = 0;
  auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
  if (f.empty() || ec != std::errc() || ptr != f.data() + f.size()) {
    throw IngestError("line " + std::to_string(line) + ": expected integer, got '" + std::string(field) + "'");
  }
  return v;
}

std::string format_real(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace bdfusion::csv
