#include "alphaloop/io/reports.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "alphaloop/dsp/angles.hpp"
#include "alphaloop/errors.hpp"
#include "alphaloop/io/formats.hpp"
#include "alphaloop/io/text_format.hpp"

namespace alphaloop::io {

namespace {
constexpr int kAngleDecimals = 4;
std::string fx(double v) { return format_fixed(v, kAngleDecimals); }
}  // namespace

void write_phase_report(const std::filesystem::path& path, const analysis::PhaseAccuracyReport& rep) {
  TableHeader h;
  h.format = "alphaloop.phase_report";
  h.version = kFormatVersion;
  h.meta.emplace_back("source", rep.source == analysis::PhaseSource::Truth ? "truth" : "estimated");
  h.meta.emplace_back("median", "circular");
  h.meta.emplace_back("error", "target_minus_measured");
  h.columns = {"kind",   "target_deg", "n_events",       "mean_deg",     "sd_deg", "median_deg",
               "plv",    "error_mean_deg", "error_sd_deg"};
  TableWriter w(path, h);
  for (const auto& k : rep.kinds) {
    w.row({std::string(loop::to_string(k.kind)), fx(k.target_deg), std::to_string(k.n_events), fx(k.stats.mean_deg),
           fx(k.stats.angular_deviation_deg), fx(k.stats.median_deg), format_fixed(k.stats.resultant_length, 6),
           fx(k.error_mean_deg), fx(k.error_sd_deg)});
  }
  w.close();
}

std::string polar_histogram_svg(std::span<const double> angles_deg, double bin_width_deg, double target_deg,
                                const std::string& title) {
  if (!(bin_width_deg > 0.0)) throw std::invalid_argument("polar histogram: bin width must be positive");
  const double nb = 360.0 / bin_width_deg;
  if (std::abs(nb - std::round(nb)) > 1e-9) throw std::invalid_argument("polar histogram: bin width must divide 360");
  const auto nbins = static_cast<std::size_t>(std::llround(nb));
  std::vector<std::size_t> counts(nbins, 0);
  for (double a : angles_deg) {
    auto b = static_cast<std::size_t>(dsp::wrap360(a) / bin_width_deg);
    counts[std::min(b, nbins - 1)] += 1;
  }
  const std::size_t peak = std::max<std::size_t>(1, *std::max_element(counts.begin(), counts.end()));

  const double cx = 200, cy = 210, rmax = 170;
  struct Pt {
    double x, y;
  };
  auto pt = [&](double deg, double r) {
    const double t = dsp::deg2rad(deg);
    return Pt{cx + r * std::cos(t), cy - r * std::sin(t)};
  };
  std::ostringstream o;
  o.setf(std::ios::fixed);
  o.precision(2);
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"400\" height=\"420\" viewBox=\"0 0 400 420\">\n";
  o << "  <title>" << title << "</title>\n";
  o << "  <text x=\"200\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" << title
    << " (n=" << angles_deg.size() << ")</text>\n";
  for (double f : {0.25, 0.5, 0.75, 1.0}) {
    o << "  <circle cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"" << f * rmax
      << "\" fill=\"none\" stroke=\"#ccc\" stroke-width=\"1\"/>\n";
  }
  for (int d = 0; d < 360; d += 90) {
    const Pt e = pt(d, rmax);
    const Pt l = pt(d, rmax + 14);
    o << "  <line x1=\"" << cx << "\" y1=\"" << cy << "\" x2=\"" << e.x << "\" y2=\"" << e.y << "\" stroke=\"#ccc\"/>\n";
    o << "  <text x=\"" << l.x << "\" y=\"" << l.y
      << "\" text-anchor=\"middle\" dominant-baseline=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << d
      << "&#176;</text>\n";
  }
  for (std::size_t b = 0; b < nbins; ++b) {
    if (counts[b] == 0) continue;
    const double r = rmax * static_cast<double>(counts[b]) / static_cast<double>(peak);
    const double a0 = static_cast<double>(b) * bin_width_deg;
    const Pt p0 = pt(a0, r);
    const Pt p1 = pt(a0 + bin_width_deg, r);
    o << "  <path d=\"M " << cx << ',' << cy << " L " << p0.x << ',' << p0.y << " A " << r << ' ' << r << " 0 0 0 "
      << p1.x << ',' << p1.y << " Z\" fill=\"#3b6fb6\" fill-opacity=\"0.75\" stroke=\"#1f3d66\" stroke-width=\"0.5\"/>\n";
  }
  const Pt tp = pt(target_deg, rmax);
  o << "  <line x1=\"" << cx << "\" y1=\"" << cy << "\" x2=\"" << tp.x << "\" y2=\"" << tp.y
    << "\" stroke=\"#c0392b\" stroke-width=\"2\" stroke-dasharray=\"6,3\"/>\n";
  o << "</svg>\n";
  return o.str();
}

void write_iaf_report(const std::filesystem::path& summary, const std::filesystem::path& spectrum,
                      const analysis::IafResult& r) {
  {
    TableHeader h;
    h.format = "alphaloop.iaf";
    h.version = kFormatVersion;
    h.columns = {"iaf_hz", "peak_prominence", "noise_floor", "c0", "c1", "c2", "c3"};
    TableWriter w(summary, h);
    const auto& c = r.detrend_coefficients;
    w.row({format_double(r.iaf_hz), format_double(r.peak_prominence), format_double(r.noise_floor), format_double(c[0]),
           format_double(c[1]), format_double(c[2]), format_double(c[3])});
    w.close();
  }
  TableHeader h;
  h.format = "alphaloop.iaf_spectrum";
  h.version = kFormatVersion;
  h.columns = {"freq_hz", "median_power", "detrended_log10"};
  TableWriter w(spectrum, h);
  for (std::size_t i = 0; i < r.freqs_hz.size(); ++i) {
    w.row({format_double(r.freqs_hz[i]), format_double(r.median_power[i]),
           std::isnan(r.detrended[i]) ? std::string() : format_double(r.detrended[i])});
  }
  w.close();
}

void write_erp_report(const std::filesystem::path& waveform, const std::filesystem::path& summary,
                      const analysis::ErpAverage& avg, std::optional<double> p1_latency_s) {
  {
    TableHeader h;
    h.format = "alphaloop.erp";
    h.version = kFormatVersion;
    h.meta.emplace_back("sample_rate_hz", format_double(avg.sample_rate_hz));
    h.columns = {"time_s", "amplitude_uv"};
    TableWriter w(waveform, h);
    for (std::size_t i = 0; i < avg.times_s.size(); ++i) w.row({format_double(avg.times_s[i]), format_double(avg.waveform[i])});
    w.close();
  }
  TableHeader h;
  h.format = "alphaloop.erp_summary";
  h.version = kFormatVersion;
  h.columns = {"kept", "rejected", "excluded", "p1_latency_s"};
  TableWriter w(summary, h);
  w.row({std::to_string(avg.kept), std::to_string(avg.rejected), std::to_string(avg.excluded),
         p1_latency_s ? format_double(*p1_latency_s) : std::string()});
  w.close();
}

void write_sol_table(const std::filesystem::path& path, const std::vector<SolRow>& rows) {
  TableHeader h;
  h.format = "alphaloop.sol";
  h.version = kFormatVersion;
  h.columns = {"name", "sol_n2_min", "status"};
  TableWriter w(path, h);
  for (const auto& r : rows) w.row({r.name, r.sol_min ? format_double(*r.sol_min) : std::string(), r.sol_min ? "ok" : "no_n2"});
  w.close();
}

GroupedValues read_grouped_values(const std::filesystem::path& path) {
  TableReader r(path, "alphaloop.grouped", kFormatVersion);
  GroupedValues g;
  const auto gi = r.header().column("group");
  const auto vi = r.header().column("value");
  if (!gi || !vi) throw ParseError(path.string() + ": needs 'group' and 'value' columns", r.line());
  std::vector<std::string_view> f;
  while (r.next(f)) {
    const std::string name(f[*gi]);
    if (name.empty()) throw ParseError(path.string() + ": empty group name", r.line());
    auto it = std::find(g.names.begin(), g.names.end(), name);
    if (it == g.names.end()) {
      g.names.push_back(name);
      g.groups.emplace_back();
      it = g.names.end() - 1;
    }
    g.groups[static_cast<std::size_t>(it - g.names.begin())].push_back(parse_double(f[*vi], r.line()));
  }
  return g;
}

void write_grouped_values(const std::filesystem::path& path, const GroupedValues& g) {
  TableHeader h;
  h.format = "alphaloop.grouped";
  h.version = kFormatVersion;
  h.columns = {"group", "value"};
  TableWriter w(path, h);
  for (std::size_t i = 0; i < g.names.size(); ++i)
    for (double v : g.groups[i]) w.row({g.names[i], format_double(v)});
  w.close();
}

void write_stats_report(const std::filesystem::path& anova, const std::filesystem::path& tukey,
                        const analysis::TukeyResult& r, const std::vector<std::string>& names) {
  {
    TableHeader h;
    h.format = "alphaloop.anova";
    h.version = kFormatVersion;
    h.columns = {"f", "df_between", "df_within", "p", "ss_between", "ss_within", "ms_within"};
    TableWriter w(anova, h);
    const auto& a = r.anova;
    w.row({format_double(a.f), format_double(a.df_between), format_double(a.df_within), format_double(a.p),
           format_double(a.ss_between), format_double(a.ss_within), format_double(a.ms_within)});
    w.close();
  }
  TableHeader h;
  h.format = "alphaloop.tukey";
  h.version = kFormatVersion;
  h.meta.emplace_back("confidence", format_double(r.confidence));
  h.meta.emplace_back("q_crit", format_double(r.q_crit));
  h.meta.emplace_back("diff", "mean_b_minus_mean_a");
  h.columns = {"group_a", "group_b", "diff", "ci_low", "ci_high", "q", "p"};
  TableWriter w(tukey, h);
  for (const auto& p : r.pairs) {
    w.row({names.at(p.a), names.at(p.b), format_double(p.diff), format_double(p.ci_low), format_double(p.ci_high),
           format_double(p.q), format_double(p.p)});
  }
  w.close();
}

}  // namespace alphaloop::io
