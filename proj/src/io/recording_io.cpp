#include <cmath>
#include <stdexcept>
#include <string>

#include "alphaloop/errors.hpp"
#include "alphaloop/io/formats.hpp"
#include "alphaloop/io/text_format.hpp"

namespace alphaloop::io {

namespace {
constexpr const char* kRecordingFormat = "alphaloop.recording";
constexpr const char* kProvenancePrefix = "provenance.";
}  // namespace

void write_recording(const std::filesystem::path& path, const EegRecording& rec, const GroundTruthPhase* truth) {
  rec.validate();
  const std::size_t n = rec.num_samples();
  if (truth && (truth->phase_deg.size() != n || truth->amp_uv.size() != n)) {
    throw std::invalid_argument("write_recording: ground truth length differs from the recording");
  }
  TableHeader h;
  h.format = kRecordingFormat;
  h.version = kFormatVersion;
  h.meta.emplace_back("sample_rate_hz", format_double(rec.sample_rate_hz));
  h.meta.emplace_back("start", rec.start_timestamp);
  for (const auto& [k, v] : rec.provenance) h.meta.emplace_back(kProvenancePrefix + k, v);
  h.columns.push_back("sample");
  for (const auto& l : rec.labels) h.columns.push_back(l);
  if (truth) {
    h.columns.push_back("truth_phase_deg");
    h.columns.push_back("truth_amp_uv");
  }
  TableWriter w(path, h);
  std::vector<std::string> fields(h.columns.size());
  for (std::size_t i = 0; i < n; ++i) {
    fields[0] = std::to_string(i);
    for (std::size_t c = 0; c < rec.num_channels(); ++c) fields[1 + c] = format_double(rec.channels[c][i]);
    if (truth) {
      fields[1 + rec.num_channels()] = format_double(truth->phase_deg[i]);
      fields[2 + rec.num_channels()] = format_double(truth->amp_uv[i]);
    }
    w.row(fields);
  }
  w.close();
}

RecordingData read_recording(const std::filesystem::path& path, std::optional<double> expected_rate_hz) {
  TableReader r(path, kRecordingFormat, kFormatVersion);
  const auto& h = r.header();
  RecordingData out;
  auto& rec = out.recording;
  rec.sample_rate_hz = parse_double(h.get("sample_rate_hz"), 0);
  if (!(rec.sample_rate_hz > 0.0)) throw ParseError(path.string() + ": sample_rate_hz must be positive", 0);
  if (expected_rate_hz && std::abs(*expected_rate_hz - rec.sample_rate_hz) > 1e-9) {
    throw ParseError(path.string() + ": sample rate " + format_double(rec.sample_rate_hz) + " Hz does not match expected " +
                         format_double(*expected_rate_hz) + " Hz",
                     0);
  }
  if (auto s = h.find("start")) rec.start_timestamp = *s;
  const std::string prefix = kProvenancePrefix;
  for (const auto& [k, v] : h.meta)
    if (k.starts_with(prefix)) rec.provenance.emplace_back(k.substr(prefix.size()), v);

  if (h.columns.empty() || h.columns[0] != "sample") throw ParseError(path.string() + ": first column must be 'sample'", r.line());
  const auto tp = h.column("truth_phase_deg");
  const auto ta = h.column("truth_amp_uv");
  if (tp.has_value() != ta.has_value()) {
    throw ParseError(path.string() + ": ground truth needs both truth_phase_deg and truth_amp_uv", r.line());
  }
  const std::size_t nch = h.columns.size() - 1 - (tp ? 2 : 0);
  if (nch < 1 || nch > 3) throw ParseError(path.string() + ": recording must have 1 to 3 channels", r.line());
  if (tp && (*tp != nch + 1 || *ta != nch + 2)) {
    throw ParseError(path.string() + ": ground-truth columns must follow the channels", r.line());
  }
  rec.labels.assign(h.columns.begin() + 1, h.columns.begin() + 1 + static_cast<std::ptrdiff_t>(nch));
  rec.channels.assign(nch, {});
  if (tp) out.truth.emplace();

  std::vector<std::string_view> f;
  std::size_t expect = 0;
  while (r.next(f)) {
    const long long idx = parse_int(f[0], r.line());
    if (idx != static_cast<long long>(expect)) {
      throw ParseError(path.string() + ": sample index " + std::to_string(idx) + " where " + std::to_string(expect) +
                           " was expected (indices must be contiguous from 0)",
                       r.line());
    }
    for (std::size_t c = 0; c < nch; ++c) rec.channels[c].push_back(parse_double(f[1 + c], r.line()));
    if (tp) {
      out.truth->phase_deg.push_back(parse_double(f[*tp], r.line()));
      out.truth->amp_uv.push_back(parse_double(f[*ta], r.line()));
    }
    ++expect;
  }
  if (expect == 0) throw ParseError(path.string() + ": no samples", r.line());
  rec.validate();
  return out;
}

}  // namespace alphaloop::io
