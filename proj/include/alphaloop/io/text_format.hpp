#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace alphaloop::io {

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);
/// Fixed-point text with `decimals` digits after the point.
std::string format_fixed(double v, int decimals);

double parse_double(std::string_view s, std::size_t line);
long long parse_int(std::string_view s, std::size_t line);

std::vector<std::string_view> split(std::string_view s, char sep);

/// Line-oriented table files:
///
///   # format=<name> version=<n>
///   # key=value            (any number of metadata lines)
///   col_a,col_b,...        (column header)
///   rows...
struct TableHeader {
  std::string format;
  int version = 1;
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::string> columns;

  std::optional<std::string> find(std::string_view key) const;
  /// Throws ParseError when the key is missing.
  const std::string& get(std::string_view key) const;
  std::optional<std::size_t> column(std::string_view name) const;
};

class TableReader {
 public:
  /// Opens `path` and parses the header, requiring `format` and `version`.
  TableReader(const std::filesystem::path& path, std::string_view format, int version);

  const TableHeader& header() const { return header_; }
  /// Next data row split on commas; false at end of file. Rows with a
  /// different field count than the column header are parse errors.
  bool next(std::vector<std::string_view>& fields);
  std::size_t line() const { return line_; }

 private:
  bool getline(std::string& out);

  std::ifstream in_;
  std::string path_;
  TableHeader header_;
  std::string buf_;
  std::size_t line_ = 0;
};

class TableWriter {
 public:
  TableWriter(const std::filesystem::path& path, const TableHeader& header);
  void row(const std::vector<std::string>& fields);
  void close();

 private:
  std::ofstream out_;
  std::string path_;
  std::size_t ncols_;
  std::string line_;
};

}  // namespace alphaloop::io
