#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace alphaloop {

/// No alpha peak stands above the detrended noise floor.
class NoPeakError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The P1 search window holds no positive local maximum.
class NoPositivePeakError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The hypnogram never reaches N2.
class NoN2Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file; `line()` is 1-based, 0 when not line-specific.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace alphaloop
