#include "alphaloop/io/cli.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "alphaloop/analysis/erp.hpp"
#include "alphaloop/analysis/iaf.hpp"
#include "alphaloop/analysis/phase_report.hpp"
#include "alphaloop/analysis/sleep.hpp"
#include "alphaloop/analysis/stats.hpp"
#include "alphaloop/dsp/angles.hpp"
#include "alphaloop/errors.hpp"
#include "alphaloop/io/bench.hpp"
#include "alphaloop/io/formats.hpp"
#include "alphaloop/io/manifest.hpp"
#include "alphaloop/io/reports.hpp"
#include "alphaloop/io/session_config.hpp"
#include "alphaloop/io/text_format.hpp"
#include "alphaloop/loop/session.hpp"
#include "alphaloop/sim/synth.hpp"

namespace alphaloop::io {

namespace fs = std::filesystem;
using Options = std::map<std::string, std::string>;

namespace {

const std::string* opt(const Options& o, const std::string& k) {
  auto it = o.find(k);
  return it == o.end() || it->second.empty() ? nullptr : &it->second;
}

const std::string& need(const Options& o, const std::string& k) {
  const std::string* v = opt(o, k);
  if (!v) throw std::invalid_argument("missing required option --" + k);
  return *v;
}

double num(const Options& o, const std::string& k, double fallback) {
  const std::string* v = opt(o, k);
  if (!v) return fallback;
  try {
    return parse_double(*v, 0);
  } catch (const ParseError&) {
    throw std::invalid_argument("--" + k + " expects a number, got '" + *v + "'");
  }
}

bool flag(const Options& o, const std::string& k, bool fallback) {
  const std::string* v = opt(o, k);
  if (!v) return fallback;
  if (*v == "true" || *v == "1") return true;
  if (*v == "false" || *v == "0") return false;
  throw std::invalid_argument("--" + k + " expects true or false");
}

std::size_t channel_of(const EegRecording& rec, const Options& o) {
  const std::string* label = opt(o, "channel");
  if (!label) return rec.channel_index("Fpz").value_or(0);
  if (auto i = rec.channel_index(*label)) return *i;
  throw std::invalid_argument("recording has no channel '" + *label + "'");
}

void set_echt_center(SessionConfig& cfg, double hz) {
  cfg.loop.echt.band.center_hz = hz;
  if (cfg.erp_target_phase_deg) {
    auto& sc = cfg.loop.scheduler;
    sc.onset_phase_deg = loop::stim_onset_phase(*cfg.erp_target_phase_deg, cfg.p1_latency_s, hz);
    sc.offset_phase_deg = dsp::wrap360(sc.onset_phase_deg + 90.0);
  }
  cfg.validate();
}

class Run {
 public:
  Run(std::string command, const Options& options, const std::string& config_json, fs::path out_dir, std::ostream& out)
      : out_(out), dir_(std::move(out_dir)) {
    fs::create_directories(dir_);
    m_.version = version();
    m_.command = std::move(command);
    m_.options = options;
    m_.config_json = config_json;
  }

  SessionConfig config() const {
    if (m_.config_json.empty()) throw std::logic_error(m_.command + " needs a session configuration");
    return parse_session_config(m_.config_json);
  }
  const Options& options() const { return m_.options; }
  std::ostream& out() { return out_; }

  fs::path input(const std::string& path) {
    if (!fs::exists(path)) throw std::invalid_argument("input '" + path + "' does not exist");
    m_.inputs.push_back(digest_file(path));
    return path;
  }
  fs::path output(const std::string& name) {
    outputs_.push_back(dir_ / name);
    return outputs_.back();
  }
  void finish() {
    for (const auto& p : outputs_)
      if (fs::exists(p)) m_.outputs.push_back(digest_file(p));
    write_manifest(dir_ / "manifest.json", m_);
  }

 private:
  std::ostream& out_;
  fs::path dir_;
  Manifest m_;
  std::vector<fs::path> outputs_;
};

void cmd_simulate(Run& run) {
  const SessionConfig cfg = run.config();
  const sim::SimTrace tr = sim::synth_recording(cfg.simulation);
  EegRecording rec = tr.recording;
  rec.provenance = {{"generator", "alphaloop simulate"},
                    {"seed", std::to_string(cfg.seed)},
                    {"oscillator_seed", std::to_string(cfg.simulation.oscillator.seed)},
                    {"noise_seed", std::to_string(cfg.simulation.noise_seed)}};
  write_recording(run.output("recording.csv"), rec, &tr.truth);
  if (!cfg.simulation.erp_stim_times_s.empty()) write_stim_times(run.output("stim_times.csv"), cfg.simulation.erp_stim_times_s);
  if (!cfg.simulation.blink_times_s.empty()) write_stim_times(run.output("blink_cues.csv"), cfg.simulation.blink_times_s);
  run.out() << "simulate: " << rec.num_samples() << " samples x " << rec.num_channels() << " channels at "
            << format_double(rec.sample_rate_hz) << " Hz\n";
}

void cmd_run_loop(Run& run) {
  SessionConfig cfg = run.config();
  const auto& o = run.options();
  if (opt(o, "iaf_hz")) set_echt_center(cfg, num(o, "iaf_hz", 0.0));
  const RecordingData data = read_recording(run.input(need(o, "recording")), cfg.sample_rate_hz);
  loop::LoopConfig lc = resolve_loop(cfg, data.recording.duration_s());
  const bool phase_log = flag(o, "phase_log", true);
  lc.log_phase = phase_log;
  const auto log = loop::run_closed_loop(data.recording, data.truth ? &*data.truth : nullptr, lc);
  write_event_log(run.output("events.csv"), log, &lc.scheduler);
  if (phase_log) write_phase_log(run.output("phase_log.csv"), log);
  run.out() << "run-loop: " << log.count(loop::EventKind::Onset) << " onsets, " << log.count(loop::EventKind::Offset)
            << " offsets, " << log.phase_log.size() << " phase estimates, " << log.channel_switches.size()
            << " channel switches\n";
}

void cmd_eval_phase(Run& run) {
  const auto& o = run.options();
  const fs::path events = run.input(need(o, "events"));
  const auto log = read_event_log(events);
  TableReader header_only(events, "alphaloop.events", kFormatVersion);
  const auto& h = header_only.header();
  auto target = [&](const char* key, const char* meta) {
    if (opt(o, key)) return num(o, key, 0.0);
    if (auto v = h.find(meta)) return parse_double(*v, 0);
    throw std::invalid_argument(std::string("event log lacks ") + meta + "; pass --" + key);
  };
  const double onset = target("onset_target", "onset_target_deg");
  const double offset = target("offset_target", "offset_target_deg");

  std::string source = opt(o, "source") ? *opt(o, "source") : "auto";
  if (source == "auto") {
    const bool truth = std::any_of(log.events.begin(), log.events.end(), [](const auto& e) { return e.truth_phase_deg.has_value(); });
    source = truth ? "truth" : "estimated";
  }
  if (source != "truth" && source != "estimated") throw std::invalid_argument("--source must be truth, estimated or auto");
  const auto src = source == "truth" ? analysis::PhaseSource::Truth : analysis::PhaseSource::Estimated;
  const auto rep = analysis::phase_accuracy(log, onset, offset, src);
  write_phase_report(run.output("phase_report.csv"), rep);

  const std::string format = opt(o, "format") ? *opt(o, "format") : "csv";
  if (format == "svg") {
    const double bw = num(o, "bin_width", 5.0);
    for (const auto& row : rep.kinds) {
      const auto angles = src == analysis::PhaseSource::Truth ? log.truth_phases(row.kind) : log.estimated_phases(row.kind);
      const std::string name = std::string("polar_") + std::string(loop::to_string(row.kind)) + ".svg";
      std::ofstream svg(run.output(name));
      svg << polar_histogram_svg(angles, bw, row.target_deg, std::string(loop::to_string(row.kind)) + " phase");
      if (!svg) throw std::runtime_error("failed to write " + name);
    }
  } else if (format != "csv") {
    throw std::invalid_argument("--format must be csv or svg");
  }
  for (const auto& row : rep.kinds) {
    run.out() << loop::to_string(row.kind) << ": n=" << row.n_events << " mean=" << format_fixed(row.stats.mean_deg, 2)
              << " sd=" << format_fixed(row.stats.angular_deviation_deg, 2)
              << " plv=" << format_fixed(row.stats.resultant_length, 4) << " error=" << format_fixed(row.error_mean_deg, 2)
              << "\n";
  }
}

void cmd_iaf(Run& run) {
  const SessionConfig cfg = run.config();
  const auto& o = run.options();
  const RecordingData data = read_recording(run.input(need(o, "recording")));
  const std::size_t ch = channel_of(data.recording, o);
  const auto r = analysis::estimate_iaf(data.recording.channels[ch], data.recording.sample_rate_hz, cfg.iaf);
  write_iaf_report(run.output("iaf.csv"), run.output("iaf_spectrum.csv"), r);
  run.out() << "iaf: " << format_fixed(r.iaf_hz, 3) << " Hz (prominence " << format_fixed(r.peak_prominence, 3) << ")\n";
}

void cmd_erp(Run& run) {
  const SessionConfig cfg = run.config();
  const auto& o = run.options();
  const RecordingData data = read_recording(run.input(need(o, "recording")));
  std::vector<double> times;
  if (const std::string* p = opt(o, "stim_times")) {
    times = read_stim_times(run.input(*p));
  } else if (const std::string* e = opt(o, "events")) {
    for (const auto& ev : read_event_log(run.input(*e)).events)
      if (ev.kind == loop::EventKind::Onset) times.push_back(ev.fire_time_s);
  } else {
    throw std::invalid_argument("erp needs --stim-times or --events");
  }
  const std::size_t ch = channel_of(data.recording, o);
  const auto avg = analysis::epoch_erp(data.recording.channels[ch], data.recording.sample_rate_hz, times, cfg.erp);
  std::optional<double> p1;
  try {
    p1 = analysis::detect_p1(avg, cfg.erp);
  } catch (const NoPositivePeakError& e) {
    run.out() << "erp: warning: " << e.what() << "\n";
  }
  write_erp_report(run.output("erp.csv"), run.output("erp_summary.csv"), avg, p1);
  run.out() << "erp: kept " << avg.kept << ", rejected " << avg.rejected << ", excluded " << avg.excluded;
  if (p1) run.out() << ", P1 at " << format_fixed(*p1 * 1e3, 1) << " ms";
  run.out() << "\n";
}

void cmd_sol(Run& run) {
  const auto& o = run.options();
  std::vector<SolRow> rows;
  std::stringstream list(need(o, "hypnograms"));
  std::string path;
  while (std::getline(list, path, ';')) {
    if (path.empty()) continue;
    const auto h = read_hypnogram(run.input(path));
    SolRow row{fs::path(path).filename().string(), std::nullopt};
    try {
      row.sol_min = analysis::sol_n2(h);
    } catch (const NoN2Error&) {
    }
    rows.push_back(row);
  }
  write_sol_table(run.output("sol.csv"), rows);
  for (const auto& r : rows) run.out() << r.name << ": " << (r.sol_min ? format_double(*r.sol_min) + " min" : "no N2") << "\n";
}

void cmd_stats(Run& run) {
  const auto& o = run.options();
  const auto g = read_grouped_values(run.input(need(o, "input")));
  const auto r = analysis::tukey_hsd(g.groups, num(o, "confidence", 0.95));
  write_stats_report(run.output("anova.csv"), run.output("tukey.csv"), r, g.names);
  run.out() << "F(" << format_double(r.anova.df_between) << "," << format_double(r.anova.df_within)
            << ") = " << format_fixed(r.anova.f, 4) << ", p = " << format_fixed(r.anova.p, 4) << "\n";
}

void cmd_bench(Run& run) {
  const auto& o = run.options();
  BenchConfig bc;
  bc.duration_s = num(o, "duration", bc.duration_s);
  bc.channels = static_cast<std::size_t>(num(o, "channels", static_cast<double>(bc.channels)));
  bc.sessions = static_cast<std::size_t>(num(o, "sessions", static_cast<double>(bc.sessions)));
  bc.seed = static_cast<std::uint64_t>(num(o, "seed", static_cast<double>(bc.seed)));
  bc.alpha_snr_db = num(o, "snr_db", bc.alpha_snr_db);
  const BenchReport r = run_bench(bc);

  TableHeader h;
  h.format = "alphaloop.bench";
  h.version = kFormatVersion;
  h.columns = {"metric", "value"};
  TableWriter w(run.output("bench.csv"), h);
  const std::vector<std::pair<std::string, double>> rows = {
      {"duration_s", bc.duration_s},
      {"sample_rate_hz", bc.sample_rate_hz},
      {"channels", static_cast<double>(bc.channels)},
      {"sessions", static_cast<double>(bc.sessions)},
      {"threads", static_cast<double>(r.threads)},
      {"samples_per_session", static_cast<double>(r.samples_per_session)},
      {"events", static_cast<double>(r.events)},
      {"processing_s", r.wall_s},
      {"realtime_factor", r.realtime_factor},
      {"latency_mean_us", r.latency.mean_us},
      {"latency_p50_us", r.latency.p50_us},
      {"latency_p99_us", r.latency.p99_us},
      {"latency_max_us", r.latency.max_us},
      {"latency_budget_us", bc.budget_s * 1e6},
      {"over_budget_fraction", r.latency.over_budget_fraction},
  };
  for (const auto& [k, v] : rows) w.row({k, format_double(v)});
  w.close();
  run.out() << "bench: " << format_fixed(bc.duration_s * static_cast<double>(bc.sessions), 0) << " s of "
            << bc.channels << "-channel stream in " << format_fixed(r.wall_s, 3) << " s ("
            << format_fixed(r.realtime_factor, 1) << "x real time, " << (r.meets_realtime() ? "PASS" : "FAIL")
            << " vs " << format_fixed(bc.min_realtime_factor, 0) << "x)\n"
            << "bench: per-sample latency mean " << format_fixed(r.latency.mean_us, 2) << " us, p50 "
            << format_fixed(r.latency.p50_us, 2) << " us, p99 " << format_fixed(r.latency.p99_us, 2) << " us, max "
            << format_fixed(r.latency.max_us, 2) << " us; budget " << format_fixed(bc.budget_s * 1e6, 0) << " us ("
            << (r.meets_budget() ? "PASS" : "FAIL") << ")\n";
}

}  // namespace

void run_command(const std::string& command, const Options& options, const std::string& config_json,
                 const fs::path& out_dir, std::ostream& out) {
  Run run(command, options, config_json, out_dir, out);
  if (command == "simulate") {
    cmd_simulate(run);
  } else if (command == "run-loop") {
    cmd_run_loop(run);
  } else if (command == "eval-phase") {
    cmd_eval_phase(run);
  } else if (command == "iaf") {
    cmd_iaf(run);
  } else if (command == "erp") {
    cmd_erp(run);
  } else if (command == "sol") {
    cmd_sol(run);
  } else if (command == "stats") {
    cmd_stats(run);
  } else if (command == "bench") {
    cmd_bench(run);
  } else {
    throw std::invalid_argument("unknown command '" + command + "'");
  }
  run.finish();
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"alphaloop: phase-locked closed-loop stimulation toolkit"};
  app.set_version_flag("--version", std::string(version()));
  app.require_subcommand(1);

  struct Common {
    std::string config, out = ".";
    std::optional<std::uint64_t> seed;
  };
  Common common;
  Options o;

  auto add_common = [&](CLI::App* sub, bool with_config) {
    if (with_config) {
      sub->add_option("--config", common.config, "Session configuration (JSON)")->check(CLI::ExistingFile);
      sub->add_option("--seed", common.seed, "Master seed for simulation streams");
    }
    sub->add_option("--out", common.out, "Output directory")->capture_default_str();
  };
  auto str_opt = [&](CLI::App* sub, const std::string& flag, const std::string& key, const std::string& help) {
    return sub->add_option_function<std::string>(flag, [&o, key](const std::string& v) { o[key] = v; }, help);
  };

  auto* simulate = app.add_subcommand("simulate", "Synthesize a recording with ground truth");
  add_common(simulate, true);

  auto* run_loop = app.add_subcommand("run-loop", "Run the closed-loop engine over a recording");
  add_common(run_loop, true);
  str_opt(run_loop, "--recording", "recording", "Recording file")->required();
  str_opt(run_loop, "--iaf-hz", "iaf_hz", "Override the ecHT band center");
  str_opt(run_loop, "--phase-log", "phase_log", "Write the per-sample phase log (true/false)");

  auto* eval = app.add_subcommand("eval-phase", "Phase-accuracy report from an event log");
  add_common(eval, false);
  str_opt(eval, "--events", "events", "Event log file")->required();
  str_opt(eval, "--format", "format", "csv or svg")->check(CLI::IsMember({"csv", "svg"}));
  str_opt(eval, "--bin-width", "bin_width", "Polar histogram bin width in degrees (default 5)");
  str_opt(eval, "--source", "source", "truth, estimated or auto");
  str_opt(eval, "--onset-target", "onset_target", "Onset target (deg) when the log lacks it");
  str_opt(eval, "--offset-target", "offset_target", "Offset target (deg) when the log lacks it");

  auto* iaf = app.add_subcommand("iaf", "Individual alpha frequency of a recording");
  add_common(iaf, true);
  str_opt(iaf, "--recording", "recording", "Recording file")->required();
  str_opt(iaf, "--channel", "channel", "Channel label (default Fpz)");

  auto* erp = app.add_subcommand("erp", "Evoked response average and P1 latency");
  add_common(erp, true);
  str_opt(erp, "--recording", "recording", "Recording file")->required();
  str_opt(erp, "--stim-times", "stim_times", "Stimulus times file");
  str_opt(erp, "--events", "events", "Event log (onset fire times are used)");
  str_opt(erp, "--channel", "channel", "Channel label (default Fpz)");

  auto* sol = app.add_subcommand("sol", "Sleep onset latency to N2 per hypnogram");
  add_common(sol, false);
  std::vector<std::string> hypnograms;
  sol->add_option("--hypnogram", hypnograms, "Hypnogram file (repeatable)")->required();

  auto* stats = app.add_subcommand("stats", "One-way ANOVA and Tukey HSD on grouped values");
  add_common(stats, false);
  str_opt(stats, "--input", "input", "Grouped values file (group,value)")->required();
  str_opt(stats, "--confidence", "confidence", "Confidence level (default 0.95)");

  auto* bench = app.add_subcommand("bench", "Closed-loop throughput and per-sample latency");
  add_common(bench, false);
  str_opt(bench, "--duration", "duration", "Stream duration in seconds (default 1800)");
  str_opt(bench, "--channels", "channels", "Channel count (default 3)");
  str_opt(bench, "--sessions", "sessions", "Concurrent sessions (default 1)");
  str_opt(bench, "--snr-db", "snr_db", "Alpha SNR in dB (default 0)");
  str_opt(bench, "--seed", "seed", "Seed (default 1)");

  auto* replay = app.add_subcommand("replay", "Regenerate artifacts from a manifest");
  std::string manifest_path;
  replay->add_option("--manifest", manifest_path, "manifest.json of an earlier run")->required()->check(CLI::ExistingFile);
  replay->add_option("--out", common.out, "Output directory")->required();

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  if (!argv_rev.empty()) argv_rev.pop_back();  // program name
  try {
    app.parse(argv_rev);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o_out, o_err;
    const int code = app.exit(e, o_out, o_err);
    out << o_out.str();
    err << o_err.str();
    return code == 0 ? 0 : 2;
  }

  try {
    if (replay->parsed()) {
      const Manifest m = read_manifest(manifest_path);
      for (const auto& in : m.inputs) {
        const FileDigest now = digest_file(in.path);
        if (now.crc32 != in.crc32 || now.bytes != in.bytes) {
          throw std::runtime_error("input '" + in.path + "' changed since the manifest was written");
        }
      }
      run_command(m.command, m.options, m.config_json, common.out, out);
      return 0;
    }

    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    if (name == "sol") {
      std::string joined;
      for (const auto& h : hypnograms) joined += (joined.empty() ? "" : ";") + h;
      o["hypnograms"] = joined;
    }
    std::string config_json;
    if (name == "simulate" || name == "run-loop" || name == "iaf" || name == "erp") {
      std::string text = "{}";
      std::string origin = "default config";
      if (!common.config.empty()) {
        std::ifstream in(common.config);
        std::stringstream ss;
        ss << in.rdbuf();
        text = ss.str();
        origin = common.config;
      }
      SessionConfig cfg = parse_session_config(text, origin);
      if (common.seed) apply_seed(cfg, *common.seed);
      config_json = to_json_text(cfg);
    }
    run_command(name, o, config_json, common.out, out);
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace alphaloop::io
