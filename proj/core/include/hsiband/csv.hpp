#ifndef HSIBAND_CSV_HPP
#define HSIBAND_CSV_HPP

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

namespace hsiband {

/// Split one CSV line on commas. No quoting; fields are trimmed of
/// surrounding whitespace and a trailing CR.
std::vector<std::string> split_line(const std::string& line);

/// Read all non-empty lines, split into fields.
std::vector<std::vector<std::string>> read_rows(std::istream& in);
std::vector<std::vector<std::string>> read_rows(const std::filesystem::path& path);

/// Compact, locale-independent formatting for CSV payloads (%.10g).
std::string format_double(double v);

std::string join(const std::vector<std::string>& fields);

/// Parse a rectangular numeric table. A leading header row and/or header
/// column is detected by its non-numeric first cell and dropped. Throws
/// ValidationError on ragged or non-numeric content.
std::vector<std::vector<double>> read_numeric_matrix(const std::filesystem::path& path);

}  // namespace hsiband

#endif
