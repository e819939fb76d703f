#include "alphaloop/io/text_format.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <system_error>

#include "alphaloop/errors.hpp"

namespace alphaloop::io {

std::string format_double(double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("format_double: non-finite value");
  std::array<char, 32> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return {buf.data(), end};
}

std::string format_fixed(double v, int decimals) {
  if (!std::isfinite(v)) throw std::invalid_argument("format_fixed: non-finite value");
  std::array<char, 64> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, decimals);
  if (ec != std::errc()) throw std::runtime_error("format_fixed: conversion failed");
  std::string s(buf.data(), end);
  if (s.starts_with('-') && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);  // no "-0.0000"
  return s;
}

double parse_double(std::string_view s, std::size_t line) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  if (b != e && *b == '+') ++b;
  const auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e || s.empty()) throw ParseError("expected a number, got '" + std::string(s) + "'", line);
  if (!std::isfinite(v)) throw ParseError("non-finite number '" + std::string(s) + "'", line);
  return v;
}

long long parse_int(std::string_view s, std::size_t line) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ParseError("expected an integer, got '" + std::string(s) + "'", line);
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::optional<std::string> TableHeader::find(std::string_view key) const {
  for (const auto& [k, v] : meta)
    if (k == key) return v;
  return std::nullopt;
}

const std::string& TableHeader::get(std::string_view key) const {
  for (const auto& kv : meta)
    if (kv.first == key) return kv.second;
  throw ParseError("header is missing '" + std::string(key) + "'", 0);
}

std::optional<std::size_t> TableHeader::column(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  return std::nullopt;
}

TableReader::TableReader(const std::filesystem::path& path, std::string_view format, int version)
    : in_(path), path_(path.string()) {
  if (!in_) throw std::runtime_error("cannot open '" + path_ + "' for reading");
  std::string l;
  if (!getline(l)) throw ParseError(path_ + ": empty file", 1);
  const std::string prefix = "# format=";
  if (!l.starts_with(prefix)) throw ParseError(path_ + ": first line must be '# format=<name> version=<n>'", line_);
  const auto parts = split(std::string_view(l).substr(prefix.size()), ' ');
  header_.format = std::string(parts[0]);
  if (parts.size() != 2 || !parts[1].starts_with("version=")) {
    throw ParseError(path_ + ": format line lacks a version field", line_);
  }
  header_.version = static_cast<int>(parse_int(parts[1].substr(8), line_));
  if (header_.format != format) {
    throw ParseError(path_ + ": expected format '" + std::string(format) + "', found '" + header_.format + "'", line_);
  }
  if (header_.version != version) {
    throw ParseError(path_ + ": unsupported " + header_.format + " version " + std::to_string(header_.version) +
                         " (this build reads version " + std::to_string(version) + ")",
                     line_);
  }
  while (getline(l)) {
    if (l.starts_with("#")) {
      const std::string_view body = std::string_view(l).substr(l.size() > 1 && l[1] == ' ' ? 2 : 1);
      const std::size_t eq = body.find('=');
      if (eq == std::string_view::npos || eq == 0) throw ParseError(path_ + ": metadata line must be '# key=value'", line_);
      header_.meta.emplace_back(std::string(body.substr(0, eq)), std::string(body.substr(eq + 1)));
      continue;
    }
    for (auto c : split(l, ',')) header_.columns.emplace_back(c);
    return;
  }
  throw ParseError(path_ + ": missing column header", line_);
}

bool TableReader::getline(std::string& out) {
  if (!std::getline(in_, out)) return false;
  ++line_;
  if (!out.empty() && out.back() == '\r') out.pop_back();
  return true;
}

bool TableReader::next(std::vector<std::string_view>& fields) {
  do {
    if (!getline(buf_)) return false;
  } while (buf_.empty());
  fields = split(buf_, ',');
  if (fields.size() != header_.columns.size()) {
    throw ParseError(path_ + ": expected " + std::to_string(header_.columns.size()) + " fields, found " +
                         std::to_string(fields.size()),
                     line_);
  }
  return true;
}

TableWriter::TableWriter(const std::filesystem::path& path, const TableHeader& header)
    : out_(path), path_(path.string()), ncols_(header.columns.size()) {
  if (!out_) throw std::runtime_error("cannot open '" + path_ + "' for writing");
  out_ << "# format=" << header.format << " version=" << header.version << '\n';
  for (const auto& [k, v] : header.meta) out_ << "# " << k << '=' << v << '\n';
  for (std::size_t i = 0; i < header.columns.size(); ++i) out_ << (i ? "," : "") << header.columns[i];
  out_ << '\n';
}

void TableWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != ncols_) throw std::logic_error("TableWriter: row width does not match the header");
  line_.clear();
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) line_ += ',';
    line_ += fields[i];
  }
  line_ += '\n';
  out_ << line_;
}

void TableWriter::close() {
  out_.flush();
  if (!out_) throw std::runtime_error("write to '" + path_ + "' failed");
  out_.close();
}

}  // namespace alphaloop::io
