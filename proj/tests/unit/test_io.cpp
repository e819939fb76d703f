#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "alphaloop/errors.hpp"
#include "alphaloop/io/cli.hpp"
#include "alphaloop/io/formats.hpp"
#include "alphaloop/io/manifest.hpp"
#include "alphaloop/io/reports.hpp"
#include "alphaloop/io/session_config.hpp"
#include "alphaloop/io/text_format.hpp"
#include "alphaloop/loop/session.hpp"
#include "alphaloop/sim/rng.hpp"
#include "alphaloop/sim/synth.hpp"
#include "doctest.h"

using namespace alphaloop;
using namespace alphaloop::io;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("alphaloop_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path operator/(const std::string& s) const { return path / s; }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& s) {
  std::ofstream out(p);
  out << s;
}

int cli(const std::vector<std::string>& args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
  std::vector<std::string> argv{"alphaloop"};
  argv.insert(argv.end(), args.begin(), args.end());
  std::ostringstream out, err;
  const int rc = run_cli(argv, out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return rc;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("number formatting round-trips and fixed angles never print negative zero") {
  std::mt19937_64 g(1);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(g) / 7.0;
    CHECK(parse_double(format_double(v), 0) == v);
  }
  CHECK(format_fixed(-0.00001, 4) == "0.0000");
  CHECK(format_fixed(314.0, 4) == "314.0000");
  CHECK(format_fixed(-1.23456, 4) == "-1.2346");
  CHECK(parse_double("+2.5", 0) == 2.5);
  CHECK_THROWS_AS(parse_double("nan", 3), ParseError);
  CHECK_THROWS_AS(parse_double("1.0x", 3), ParseError);
  CHECK_THROWS_AS(parse_double("", 3), ParseError);
  CHECK(parse_int("-12", 0) == -12);
  CHECK_THROWS_AS(parse_int("1.5", 0), ParseError);
  try {
    parse_double("abc", 17);
  } catch (const ParseError& e) {
    CHECK(e.line() == 17);
    CHECK(std::string(e.what()).starts_with("line 17: "));
  }
  CHECK(split("a,,b", ',').size() == 3);
}

TEST_CASE("table reader validates format, version and field counts") {
  TempDir d;
  spit(d / "t.csv", "# format=alphaloop.grouped version=1\n# note=x\ngroup,value\na,1\n\nb,2\n");
  TableReader r(d / "t.csv", "alphaloop.grouped", 1);
  CHECK(r.header().get("note") == "x");
  CHECK(r.header().column("value") == 1);
  std::vector<std::string_view> f;
  CHECK(r.next(f));
  CHECK(f[0] == "a");
  CHECK(r.next(f));
  CHECK(f[0] == "b");
  CHECK_FALSE(r.next(f));
  CHECK_THROWS_AS(TableReader(d / "t.csv", "alphaloop.events", 1), ParseError);
  CHECK_THROWS_AS(TableReader(d / "t.csv", "alphaloop.grouped", 2), ParseError);
  spit(d / "bad.csv", "# format=alphaloop.grouped version=1\ngroup,value\na,1,2\n");
  TableReader bad(d / "bad.csv", "alphaloop.grouped", 1);
  try {
    bad.next(f);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  CHECK_THROWS(TableReader(d / "missing.csv", "alphaloop.grouped", 1));
}

TEST_CASE("recording round-trip is lossless, with and without ground truth") {
  TempDir d;
  sim::SynthConfig sc;
  sc.duration_s = 4.0;
  sc.noise.alpha_snr_db = 3.0;
  auto tr = sim::synth_recording(sc);
  write_recording(d / "r.csv", tr.recording, &tr.truth);
  const auto back = read_recording(d / "r.csv", 250.0);
  CHECK(back.recording.channels == tr.recording.channels);
  CHECK(back.recording.labels == tr.recording.labels);
  CHECK(back.recording.provenance == tr.recording.provenance);
  REQUIRE(back.truth.has_value());
  CHECK(back.truth->phase_deg == tr.truth.phase_deg);
  CHECK(back.truth->amp_uv == tr.truth.amp_uv);
  CHECK_THROWS_AS(read_recording(d / "r.csv", 500.0), ParseError);

  write_recording(d / "plain.csv", tr.recording);
  CHECK_FALSE(read_recording(d / "plain.csv").truth.has_value());

  std::string text = slurp(d / "plain.csv");
  const auto pos = text.find("\n5,");
  text.replace(pos, 3, "\n6,");
  spit(d / "gap.csv", text);
  CHECK_THROWS_AS(read_recording(d / "gap.csv"), ParseError);
}

TEST_CASE("event log round-trip is idempotent and keeps targets") {
  TempDir d;
  sim::SynthConfig sc;
  sc.duration_s = 12.0;
  sc.noise.alpha_snr_db = 5.0;
  const auto tr = sim::synth_recording(sc);
  auto cfg = loop::LoopConfig::defaults();
  cfg.scheduler.session_duration_s = 12.0;
  const auto log = loop::run_closed_loop(tr, cfg);
  write_event_log(d / "e.csv", log, &cfg.scheduler);
  const auto back = read_event_log(d / "e.csv");
  REQUIRE(back.events.size() == log.events.size());
  CHECK(back.condition == log.condition);
  for (std::size_t i = 0; i < log.events.size(); ++i) {
    CHECK(back.events[i].kind == log.events[i].kind);
    CHECK(back.events[i].fire_time_s == log.events[i].fire_time_s);
    CHECK(back.events[i].decision_time_s == log.events[i].decision_time_s);
    CHECK(std::abs(back.events[i].estimated_phase_deg - log.events[i].estimated_phase_deg) <= 5e-5);
    CHECK(std::abs(*back.events[i].truth_phase_deg - *log.events[i].truth_phase_deg) <= 5e-5);
  }
  write_event_log(d / "e2.csv", back, &cfg.scheduler);
  CHECK(slurp(d / "e.csv") == slurp(d / "e2.csv"));
  TableReader r(d / "e.csv", "alphaloop.events", 1);
  CHECK(r.header().get("onset_target_deg") == "314.0000");

  write_phase_log(d / "p.csv", log);
  const auto pl = read_phase_log(d / "p.csv");
  REQUIRE(pl.size() == log.phase_log.size());
  CHECK(pl.back().time_s == log.phase_log.back().time_s);

  std::string text = slurp(d / "e.csv");
  std::vector<std::string> lines;
  std::stringstream ss(text);
  for (std::string l; std::getline(ss, l);) lines.push_back(l);
  std::swap(lines[lines.size() - 1], lines[lines.size() - 2]);
  std::string swapped;
  for (const auto& l : lines) swapped += l + "\n";
  spit(d / "unordered.csv", swapped);
  CHECK_THROWS_AS(read_event_log(d / "unordered.csv"), ParseError);
}

TEST_CASE("hypnogram and stimulus-time files round-trip") {
  TempDir d;
  analysis::Hypnogram h;
  using S = analysis::SleepStage;
  h.stages = {S::W, S::N1, S::N2, S::REM, S::IND};
  write_hypnogram(d / "h.csv", h);
  const auto hb = read_hypnogram(d / "h.csv");
  CHECK(hb.stages == h.stages);
  CHECK(hb.epoch_duration_s == 30.0);
  const std::vector<double> t{1.0, 2.25, 3.125};
  write_stim_times(d / "s.csv", t);
  CHECK(read_stim_times(d / "s.csv") == t);
}

TEST_CASE("session config: strict keys, seeds, derived phases and resolved round-trip") {
  const auto def = parse_session_config("{}");
  CHECK(def.loop.echt.window_samples == 250);
  CHECK(def.simulation.oscillator.seed == sim::derive_seed(1, 1));
  CHECK(def.simulation.noise_seed == sim::derive_seed(1, 2));

  try {
    parse_session_config(R"({"scheduler": {"onset_phase": 10}})");
    FAIL("unknown key accepted");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()) == "config: 'scheduler.onset_phase' is not a recognized key");
  }
  CHECK_THROWS_AS(parse_session_config(R"({"bogus": 1})"), std::invalid_argument);
  CHECK_THROWS_AS(parse_session_config(R"({"echt": {"center_hz": "ten"}})"), std::invalid_argument);
  CHECK_THROWS_AS(parse_session_config("{not json"), std::invalid_argument);

  const auto c = parse_session_config(R"({"seed": 9, "sample_rate_hz": 500, "simulation": {"oscillator": {"seed": 4}},
                                          "scheduler": {"erp_target_phase_deg": 180}})");
  CHECK(c.simulation.oscillator.seed == 4);
  CHECK(c.simulation.noise_seed == sim::derive_seed(9, 2));
  CHECK(c.loop.echt.window_samples == 500);
  CHECK(c.loop.preprocess.sample_rate == 500.0);
  CHECK(c.loop.scheduler.onset_phase_deg == doctest::Approx(315.36));
  CHECK(c.loop.scheduler.offset_phase_deg == doctest::Approx(45.36));
  CHECK_THROWS_AS(parse_session_config(R"({"scheduler": {"erp_target_phase_deg": 180, "onset_phase_deg": 10}})"),
                  std::invalid_argument);

  const std::string text = to_json_text(c);
  CHECK(to_json_text(parse_session_config(text)) == text);

  const auto lc = resolve_loop(def, 42.0);
  CHECK(lc.scheduler.session_duration_s == 42.0);
  const auto fixed = parse_session_config(R"({"scheduler": {"session_duration_s": 30}})");
  CHECK(resolve_loop(fixed, 42.0).scheduler.session_duration_s == 30.0);
}

TEST_CASE("manifest round-trip and digests") {
  TempDir d;
  spit(d / "a.txt", "hello");
  const auto dg = digest_file(d / "a.txt");
  CHECK(dg.bytes == 5);
  CHECK(dg.crc32 == 0x3610a686u);
  Manifest m;
  m.version = version();
  m.command = "stats";
  m.options = {{"input", "x.csv"}};
  m.config_json = to_json_text(parse_session_config("{}"));
  m.inputs = {dg};
  write_manifest(d / "m.json", m);
  const auto b = read_manifest(d / "m.json");
  CHECK(b.command == "stats");
  CHECK(b.options == m.options);
  CHECK(b.inputs[0].crc32 == dg.crc32);
  CHECK(parse_session_config(b.config_json).loop.echt.window_samples == 250);
}

TEST_CASE("polar histogram SVG") {
  const std::vector<double> a{0.0, 1.0, 90.0, 359.0};
  const auto svg = polar_histogram_svg(a, 5.0, 314.0, "onset");
  CHECK(svg.starts_with("<svg"));
  CHECK(svg.find("onset") != std::string::npos);
  CHECK_THROWS_AS(polar_histogram_svg(a, 7.0, 0.0, "x"), std::invalid_argument);
}

TEST_CASE("cli end-to-end: simulate, run-loop, eval-phase, iaf, erp and replay") {
  TempDir d;
  spit(d / "cfg.json", R"({"simulation": {"duration_s": 90, "noise": {"alpha_snr_db": 3},
                           "erp": {"stim_times_s": [5, 7, 9, 11, 13, 15, 17, 19, 21, 23, 25, 27, 29, 31]}}})");
  const std::string cfg = (d / "cfg.json").string();
  std::string out, err;
  REQUIRE(cli({"simulate", "--config", cfg, "--seed", "5", "--out", (d / "sim").string()}, &out, &err) == 0);
  CHECK(fs::exists(d / "sim" / "recording.csv"));
  CHECK(fs::exists(d / "sim" / "stim_times.csv"));
  CHECK(fs::exists(d / "sim" / "manifest.json"));
  const std::string rec = (d / "sim" / "recording.csv").string();

  REQUIRE(cli({"run-loop", "--config", cfg, "--recording", rec, "--out", (d / "loop").string()}, &out, &err) == 0);
  CHECK(out.find("onsets") != std::string::npos);
  const auto log = read_event_log(d / "loop" / "events.csv");
  CHECK(log.events.size() > 100);

  REQUIRE(cli({"eval-phase", "--events", (d / "loop" / "events.csv").string(), "--format", "svg", "--out",
               (d / "eval").string()}) == 0);
  CHECK(fs::exists(d / "eval" / "phase_report.csv"));
  CHECK(fs::exists(d / "eval" / "polar_onset.svg"));

  REQUIRE(cli({"iaf", "--recording", rec, "--out", (d / "iaf").string()}, &out) == 0);
  CHECK(out.find("iaf: 10.") != std::string::npos);

  REQUIRE(cli({"erp", "--config", cfg, "--recording", rec, "--stim-times", (d / "sim" / "stim_times.csv").string(),
               "--out", (d / "erp").string()}, &out) == 0);
  CHECK(fs::exists(d / "erp" / "erp_summary.csv"));

  REQUIRE(cli({"replay", "--manifest", (d / "loop" / "manifest.json").string(), "--out", (d / "replay").string()}) == 0);
  CHECK(slurp(d / "loop" / "events.csv") == slurp(d / "replay" / "events.csv"));

  // seeded simulation is reproducible
  REQUIRE(cli({"simulate", "--config", cfg, "--seed", "5", "--out", (d / "sim2").string()}) == 0);
  CHECK(slurp(d / "sim" / "recording.csv") == slurp(d / "sim2" / "recording.csv"));

  // replay refuses a modified input
  spit(d / "sim" / "recording.csv", slurp(d / "sim" / "recording.csv") + "\n");
  CHECK(cli({"replay", "--manifest", (d / "loop" / "manifest.json").string(), "--out", (d / "r2").string()}, &out, &err) == 1);
  CHECK(err.find("changed") != std::string::npos);
}

TEST_CASE("cli sol and stats") {
  TempDir d;
  using S = analysis::SleepStage;
  analysis::Hypnogram a, b;
  a.stages = {S::W, S::W, S::N1, S::N2};
  b.stages = {S::W, S::N1};
  write_hypnogram(d / "a.csv", a);
  write_hypnogram(d / "b.csv", b);
  std::string out;
  REQUIRE(cli({"sol", "--hypnogram", (d / "a.csv").string(), "--hypnogram", (d / "b.csv").string(), "--out",
               (d / "sol").string()}, &out) == 0);
  const std::string sol = slurp(d / "sol" / "sol.csv");
  CHECK(sol.find("a.csv,1.5,ok") != std::string::npos);
  CHECK(sol.find("b.csv,,no_n2") != std::string::npos);

  GroupedValues g;
  g.names = {"control", "trough", "peak"};
  g.groups = {{30, 40, 35, 38}, {20, 18, 25, 22}, {15, 12, 19, 16}};
  write_grouped_values(d / "g.csv", g);
  REQUIRE(cli({"stats", "--input", (d / "g.csv").string(), "--out", (d / "st").string()}, &out) == 0);
  CHECK(out.starts_with("F(2,9)"));
  CHECK(slurp(d / "st" / "tukey.csv").find("control,peak,") != std::string::npos);
}

TEST_CASE("cli exit codes") {
  TempDir d;
  std::string out, err;
  CHECK(cli({}, &out, &err) == 2);
  CHECK(cli({"run-loop"}, &out, &err) == 2);
  CHECK(cli({"run-loop", "--recording", (d / "none.csv").string()}, &out, &err) == 1);
  spit(d / "bad.json", R"({"echt": {"centre_hz": 10}})");
  spit(d / "r.csv", "x");
  CHECK(cli({"run-loop", "--config", (d / "bad.json").string(), "--recording", (d / "r.csv").string(), "--out",
             (d / "o").string()}, &out, &err) == 1);
  CHECK(err.find("echt.centre_hz") != std::string::npos);
  CHECK(cli({"--version"}, &out, &err) == 0);
  CHECK(out.find(version()) != std::string::npos);

  const std::string exe = ALPHALOOP_CLI_PATH;
  CHECK(WEXITSTATUS(std::system((exe + " --help > /dev/null").c_str())) == 0);
  CHECK(WEXITSTATUS(std::system((exe + " simulate --bogus > /dev/null 2>&1").c_str())) == 2);
  CHECK(WEXITSTATUS(std::system((exe + " bench --duration 1 --out " + d.path.string() + " > /dev/null 2>&1").c_str())) == 1);
}

}  // TEST_SUITE
