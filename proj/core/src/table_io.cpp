#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "chl/error.hpp"
#include "chl/io.hpp"

namespace chl {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

// Yields lines without their terminator; a final empty line after the last
// LF is dropped. A trailing CR is tolerated.
std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

double parse_number(std::string_view cell, std::size_t line_no) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (!cell.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (cell.empty() || ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw ParseError("line " + std::to_string(line_no) + ": '" + std::string(cell) +
                     "' is not a finite number");
  }
  return v;
}

}  // namespace

std::string format_number(double value) {
  char buf[512];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed);
  if (ec != std::errc()) {
    const auto [p2, e2] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, p2);
  }
  return std::string(buf, ptr);
}

std::string write_table(const SampleTable& table) {
  require_canonical_bands(table);
  std::string out(kTableHeader);
  out += '\n';
  for (const Sample& s : table.rows) {
    for (std::size_t b = 0; b < kNumBands; ++b) {
      out += format_number(s.rrs[b]);
      out += ',';
    }
    if (s.chl) out += format_number(*s.chl);
    out += '\n';
  }
  return out;
}

SampleTable read_table(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty() || lines.front() != kTableHeader) {
    throw SchemaError("table header must be exactly '" + std::string(kTableHeader) + "'");
  }
  SampleTable table;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto fields = split_fields(lines[i]);
    if (fields.size() != kNumBands + 1) {
      throw ParseError("line " + std::to_string(i + 1) + ": expected 7 fields, got " +
                       std::to_string(fields.size()));
    }
    Sample s;
    for (std::size_t b = 0; b < kNumBands; ++b) s.rrs[b] = parse_number(fields[b], i + 1);
    if (!fields[kNumBands].empty()) s.chl = parse_number(fields[kNumBands], i + 1);
    table.rows.push_back(s);
  }
  return table;
}

std::vector<double> NumericCsv::column(std::string_view name) const {
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] != name) continue;
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[c]);
    return out;
  }
  throw SchemaError("CSV has no column '" + std::string(name) + "'");
}

NumericCsv read_numeric_csv(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw SchemaError("CSV is empty");
  NumericCsv csv;
  for (auto f : split_fields(lines.front())) csv.header.emplace_back(f);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto fields = split_fields(lines[i]);
    if (fields.size() != csv.header.size()) {
      throw ParseError("line " + std::to_string(i + 1) + ": field count differs from header");
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (auto f : fields) {
      row.push_back(f.empty() ? std::numeric_limits<double>::quiet_NaN() : parse_number(f, i + 1));
    }
    csv.rows.push_back(std::move(row));
  }
  return csv;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("failed reading " + path.string());
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace chl
