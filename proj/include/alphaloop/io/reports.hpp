#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "alphaloop/analysis/erp.hpp"
#include "alphaloop/analysis/iaf.hpp"
#include "alphaloop/analysis/phase_report.hpp"
#include "alphaloop/analysis/stats.hpp"

namespace alphaloop::io {

/// Table-3-style rows, one per event kind.
void write_phase_report(const std::filesystem::path& path, const analysis::PhaseAccuracyReport& rep);

/// Polar histogram of angles (0° to the right, counterclockwise) with a marker at
/// the target. bin_width_deg must divide 360.
std::string polar_histogram_svg(std::span<const double> angles_deg, double bin_width_deg, double target_deg,
                                const std::string& title);

void write_iaf_report(const std::filesystem::path& summary, const std::filesystem::path& spectrum,
                      const analysis::IafResult& r);

void write_erp_report(const std::filesystem::path& waveform, const std::filesystem::path& summary,
                      const analysis::ErpAverage& avg, std::optional<double> p1_latency_s);

struct SolRow {
  std::string name;
  std::optional<double> sol_min;  // empty when the night never reaches N2
};
void write_sol_table(const std::filesystem::path& path, const std::vector<SolRow>& rows);

struct GroupedValues {
  std::vector<std::string> names;
  analysis::Groups groups;
};
/// Columns group,value; group order follows first appearance.
GroupedValues read_grouped_values(const std::filesystem::path& path);
void write_grouped_values(const std::filesystem::path& path, const GroupedValues& g);
void write_stats_report(const std::filesystem::path& anova, const std::filesystem::path& tukey,
                        const analysis::TukeyResult& r, const std::vector<std::string>& names);

}  // namespace alphaloop::io
