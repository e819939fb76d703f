#include <stdexcept>
#include <string>

#include "alphaloop/errors.hpp"
#include "alphaloop/io/formats.hpp"
#include "alphaloop/io/text_format.hpp"

namespace alphaloop::io {

namespace {
constexpr const char* kHypnogramFormat = "alphaloop.hypnogram";
}

void write_hypnogram(const std::filesystem::path& path, const analysis::Hypnogram& h) {
  h.validate();
  TableHeader th;
  th.format = kHypnogramFormat;
  th.version = kFormatVersion;
  th.meta.emplace_back("epoch_duration_s", format_double(h.epoch_duration_s));
  th.columns = {"epoch_index", "stage"};
  TableWriter w(path, th);
  for (std::size_t i = 0; i < h.stages.size(); ++i) w.row({std::to_string(i), std::string(analysis::to_string(h.stages[i]))});
  w.close();
}

analysis::Hypnogram read_hypnogram(const std::filesystem::path& path) {
  TableReader r(path, kHypnogramFormat, kFormatVersion);
  analysis::Hypnogram h;
  if (auto d = r.header().find("epoch_duration_s")) h.epoch_duration_s = parse_double(*d, 0);
  const auto& cols = r.header().columns;
  if (cols.size() != 2 || cols[0] != "epoch_index" || cols[1] != "stage") {
    throw ParseError(path.string() + ": columns must be 'epoch_index,stage'", r.line());
  }
  std::vector<std::string_view> f;
  while (r.next(f)) {
    const long long idx = parse_int(f[0], r.line());
    if (idx != static_cast<long long>(h.stages.size())) {
      throw ParseError(path.string() + ": epoch index " + std::to_string(idx) + " where " +
                           std::to_string(h.stages.size()) + " was expected",
                       r.line());
    }
    try {
      h.stages.push_back(analysis::sleep_stage_from_string(f[1]));
    } catch (const std::invalid_argument& e) {
      throw ParseError(path.string() + ": " + e.what(), r.line());
    }
  }
  try {
    h.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(path.string() + ": " + e.what(), r.line());
  }
  return h;
}

}  // namespace alphaloop::io
