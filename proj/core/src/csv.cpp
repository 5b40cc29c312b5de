#include "hsiband/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>

#include "hsiband/error.hpp"

namespace hsiband {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

bool parse_double(const std::string& s, double& out) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(trim(cur));
  return fields;
}

std::vector<std::vector<std::string>> read_rows(std::istream& in) {
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    rows.push_back(split_line(line));
  }
  return rows;
}

std::vector<std::vector<std::string>> read_rows(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open CSV file: " + path.string());
  return read_rows(in);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string join(const std::vector<std::string>& fields) {
  std::string out;
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += fields[i];
  }
  return out;
}

std::vector<std::vector<double>> read_numeric_matrix(const std::filesystem::path& path) {
  auto rows = read_rows(path);
  if (rows.empty()) throw ValidationError("empty CSV file: " + path.string());

  double probe = 0.0;
  size_t row0 = parse_double(rows[0][0], probe) ? 0 : 1;
  if (row0 == 1 && rows.size() == 1)
    throw ValidationError("CSV has a header but no data rows: " + path.string());
  // Header column present if the first data row starts non-numeric.
  size_t col0 = parse_double(rows[row0][0], probe) ? 0 : 1;

  std::vector<std::vector<double>> out;
  size_t width = 0;
  for (size_t r = row0; r < rows.size(); ++r) {
    const auto& fields = rows[r];
    if (fields.size() <= col0)
      throw ValidationError("ragged CSV row " + std::to_string(r + 1) + " in " + path.string());
    std::vector<double> vals;
    vals.reserve(fields.size() - col0);
    for (size_t c = col0; c < fields.size(); ++c) {
      double v;
      if (!parse_double(fields[c], v))
        throw ValidationError("non-numeric CSV cell at row " + std::to_string(r + 1) +
                              ", col " + std::to_string(c + 1) + " in " + path.string());
      vals.push_back(v);
    }
    if (width == 0) {
      width = vals.size();
    } else if (vals.size() != width) {
      throw ValidationError("ragged CSV row " + std::to_string(r + 1) + " in " + path.string());
    }
    out.push_back(std::move(vals));
  }
  return out;
}

}  // namespace hsiband
