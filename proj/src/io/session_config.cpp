#include "alphaloop/io/session_config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "alphaloop/dsp/angles.hpp"
#include "alphaloop/sim/rng.hpp"
#include "json.hpp"

namespace alphaloop::io {

using nlohmann::json;

namespace {

/// Strict object reader: every key must be consumed before finish().
class Node {
 public:
  Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail("", "must be an object");
  }

  bool has(const char* k) const { return j_.contains(k); }

  void num(const char* k, double& out) {
    if (const json* v = take(k)) {
      if (!v->is_number()) fail(k, "must be a number");
      out = v->get<double>();
    }
  }
  void opt_num(const char* k, std::optional<double>& out) {
    if (const json* v = take(k)) {
      if (v->is_null()) {
        out.reset();
      } else if (v->is_number()) {
        out = v->get<double>();
      } else {
        fail(k, "must be a number or null");
      }
    }
  }
  template <class Int>
  void integer(const char* k, Int& out) {
    if (const json* v = take(k)) {
      if (!v->is_number_integer()) fail(k, "must be an integer");
      if constexpr (std::is_unsigned_v<Int>) {
        if (v->is_number_unsigned()) {
          out = static_cast<Int>(v->get<std::uint64_t>());
          return;
        }
        if (v->get<long long>() < 0) fail(k, "must be >= 0");
      }
      out = static_cast<Int>(v->get<long long>());
    }
  }
  void boolean(const char* k, bool& out) {
    if (const json* v = take(k)) {
      if (!v->is_boolean()) fail(k, "must be true or false");
      out = v->get<bool>();
    }
  }
  bool str(const char* k, std::string& out) {
    if (const json* v = take(k)) {
      if (!v->is_string()) fail(k, "must be a string");
      out = v->get<std::string>();
      return true;
    }
    return false;
  }
  void num_list(const char* k, std::vector<double>& out) {
    if (const json* v = take(k)) {
      if (!v->is_array()) fail(k, "must be an array of numbers");
      out.clear();
      for (const auto& x : *v) {
        if (!x.is_number()) fail(k, "must be an array of numbers");
        out.push_back(x.get<double>());
      }
    }
  }
  std::optional<Node> child(const char* k) {
    if (const json* v = take(k)) return Node(*v, key_path(k));
    return std::nullopt;
  }
  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) fail(k, "is not a recognized key");
    }
  }
  [[noreturn]] void fail(const std::string& k, const std::string& msg) const {
    throw std::invalid_argument("config: '" + key_path(k) + "' " + msg);
  }

 private:
  std::string key_path(const std::string& k) const {
    if (k.empty()) return path_.empty() ? "<root>" : path_;
    return path_.empty() ? k : path_ + "." + k;
  }
  const json* take(const char* k) {
    seen_.insert(k);
    auto it = j_.find(k);
    return it == j_.end() ? nullptr : &*it;
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string_view correction_name(loop::PhaseCorrection c) {
  switch (c) {
    case loop::PhaseCorrection::None: return "none";
    case loop::PhaseCorrection::Center: return "center";
    case loop::PhaseCorrection::Tracked: return "tracked";
  }
  return "?";
}

loop::PhaseCorrection correction_from(const std::string& s) {
  if (s == "none") return loop::PhaseCorrection::None;
  if (s == "center") return loop::PhaseCorrection::Center;
  if (s == "tracked") return loop::PhaseCorrection::Tracked;
  throw std::invalid_argument("config: 'tracking.phase_correction' must be none, center or tracked");
}

}  // namespace

void apply_seed(SessionConfig& cfg, std::uint64_t seed) {
  cfg.seed = seed;
  cfg.simulation.oscillator.seed = sim::derive_seed(seed, 1);
  cfg.simulation.noise_seed = sim::derive_seed(seed, 2);
}

void SessionConfig::validate() const {
  if (!(sample_rate_hz > 0.0)) throw std::invalid_argument("config: sample_rate_hz must be positive");
  simulation.oscillator.validate();
  simulation.erp.validate();
  if (!(simulation.duration_s >= 2.0)) throw std::invalid_argument("config: simulation.duration_s must be >= 2");
  if (session_duration_s && !(*session_duration_s > 0.0)) {
    throw std::invalid_argument("config: scheduler.session_duration_s must be positive");
  }
  if (!(p1_latency_s >= 0.0)) throw std::invalid_argument("config: scheduler.p1_latency_s must be >= 0");
  auto lc = loop;
  lc.scheduler.session_duration_s = session_duration_s.value_or(1.0);
  lc.validate();
  iaf.validate();
  erp.validate();
}

SessionConfig parse_session_config(std::string_view json_text, std::string_view origin) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string(origin) + ": invalid JSON: " + e.what());
  }
  SessionConfig c;
  Node root(j, "");
  if (root.has("seed")) {
    std::uint64_t s = 0;
    root.integer("seed", s);
    c.seed = s;
  }
  apply_seed(c, c.seed);
  root.num("sample_rate_hz", c.sample_rate_hz);
  const double fs = c.sample_rate_hz;
  c.simulation.sample_rate = fs;
  c.loop = loop::LoopConfig::defaults(10.0, fs);

  if (auto s = root.child("simulation")) {
    auto& sc = c.simulation;
    s->num("duration_s", sc.duration_s);
    s->integer("noise_seed", sc.noise_seed);
    s->num("side_channel_attenuation", sc.side_channel_attenuation);
    if (auto o = s->child("oscillator")) {
      auto& os = sc.oscillator;
      o->num("base_freq_hz", os.base_freq_hz);
      o->num("amplitude_uv", os.amplitude_uv);
      o->num("am_depth", os.am_depth);
      o->num("am_rate_hz", os.am_rate_hz);
      o->num("freq_jitter_hz", os.freq_jitter_hz);
      o->opt_num("initial_phase_deg", os.initial_phase_deg);
      o->integer("seed", os.seed);
      o->finish();
    }
    if (auto n = s->child("noise")) {
      n->opt_num("alpha_snr_db", sc.noise.alpha_snr_db);
      n->num("level_uv", sc.noise.level_uv);
      n->num("snr_band_half_width_hz", sc.noise.snr_band_half_width_hz);
      n->finish();
    }
    if (auto b = s->child("blinks")) {
      b->num_list("times_s", sc.blink_times_s);
      b->num("peak_uv", sc.blink_peak_uv);
      b->finish();
    }
    if (auto e = s->child("erp")) {
      auto& t = sc.erp;
      e->num_list("stim_times_s", sc.erp_stim_times_s);
      e->num("p1_latency_s", t.p1_latency_s);
      e->num("p1_amplitude_uv", t.p1_amplitude_uv);
      e->num("p1_width_s", t.p1_width_s);
      e->num("n1_delay_s", t.n1_delay_s);
      e->num("n1_amplitude_uv", t.n1_amplitude_uv);
      e->num("n1_width_s", t.n1_width_s);
      e->boolean("phase_dependent", t.phase_dependent);
      e->num("post_stim_alpha_gain_peak", t.post_stim_alpha_gain_peak);
      e->num("post_stim_alpha_gain_trough", t.post_stim_alpha_gain_trough);
      e->num("gain_horizon_s", t.gain_horizon_s);
      e->finish();
    }
    s->finish();
  }

  auto& lc = c.loop;
  if (auto e = root.child("echt")) {
    e->integer("window_samples", lc.echt.window_samples);
    e->num("center_hz", lc.echt.band.center_hz);
    e->num("half_bandwidth_hz", lc.echt.band.half_bandwidth_hz);
    e->integer("order", lc.echt.band.order);
    e->finish();
  }
  if (auto p = root.child("preprocess")) {
    double lo = lc.preprocess.low_hz(), hi = lc.preprocess.high_hz();
    int order = lc.preprocess.order;
    p->num("low_hz", lo);
    p->num("high_hz", hi);
    p->integer("order", order);
    p->finish();
    lc.preprocess = dsp::BandpassSpec::from_edges(lo, hi, order, fs);
  }
  if (auto s = root.child("scheduler")) {
    auto& sc = lc.scheduler;
    std::string cond;
    if (s->str("condition", cond)) {
      const auto stim = sc.stimulus;
      sc = loop::SchedulerConfig::for_condition(loop::condition_from_string(cond));
      sc.stimulus = stim;
    }
    const bool explicit_phases = s->has("onset_phase_deg") || s->has("offset_phase_deg");
    s->num("onset_phase_deg", sc.onset_phase_deg);
    s->num("offset_phase_deg", sc.offset_phase_deg);
    s->opt_num("session_duration_s", c.session_duration_s);
    s->num("min_inter_onset_s", sc.min_inter_onset_s);
    s->num("warmup_s", sc.warmup_s);
    s->num("p1_latency_s", c.p1_latency_s);
    s->opt_num("erp_target_phase_deg", c.erp_target_phase_deg);
    s->finish();
    if (c.erp_target_phase_deg) {
      const double onset = loop::stim_onset_phase(*c.erp_target_phase_deg, c.p1_latency_s, lc.echt.band.center_hz);
      const double offset = dsp::wrap360(onset + 90.0);
      if (explicit_phases &&
          (dsp::circ_dist(onset, sc.onset_phase_deg) > 1e-9 || dsp::circ_dist(offset, sc.offset_phase_deg) > 1e-9)) {
        s->fail("erp_target_phase_deg", "conflicts with explicit onset/offset phases");
      }
      sc.onset_phase_deg = onset;
      sc.offset_phase_deg = offset;
    }
  }
  if (auto s = root.child("stimulus")) {
    auto& st = lc.scheduler.stimulus;
    s->num("pulse_duration_s", st.pulse_duration_s);
    s->num("pulse_level_db_spl", st.pulse_level_db_spl);
    s->num("background_level_db_spl", st.background_level_db_spl);
    s->num("snr_db", st.snr_db);
    s->finish();
  }
  if (auto l = root.child("latency")) {
    l->num("pipeline_delay_s", lc.latency.pipeline_delay_s);
    l->num("extra_output_delay_s", lc.latency.extra_output_delay_s);
    l->boolean("compensate", lc.latency.compensate);
    l->finish();
  }
  if (auto ch = root.child("channels")) {
    ch->num("rms_window_s", lc.channels.rms_window_s);
    ch->num("switch_threshold_uv", lc.channels.switch_threshold_uv);
    ch->integer("initial_channel", lc.channels.initial_channel);
    ch->finish();
  }
  if (auto t = root.child("tracking")) {
    std::string corr;
    if (t->str("phase_correction", corr)) lc.correction = correction_from(corr);
    t->num("freq_smoothing_s", lc.freq_smoothing_s);
    t->boolean("log_phase", lc.log_phase);
    t->finish();
  }
  if (auto i = root.child("iaf")) {
    auto& ic = c.iaf;
    i->integer("n_tapers", ic.spectrogram.n_tapers);
    i->num("window_s", ic.spectrogram.window_s);
    i->num("step_s", ic.spectrogram.step_s);
    i->num("time_bandwidth", ic.spectrogram.time_bandwidth);
    i->integer("nfft", ic.spectrogram.nfft);
    i->num("fit_low_hz", ic.fit_low_hz);
    i->num("fit_high_hz", ic.fit_high_hz);
    i->num("search_low_hz", ic.search_low_hz);
    i->num("search_high_hz", ic.search_high_hz);
    i->num("floor_factor", ic.floor_factor);
    i->num("min_duration_s", ic.min_duration_s);
    i->finish();
  }
  if (auto e = root.child("erp")) {
    auto& ec = c.erp;
    e->num("epoch_start_s", ec.epoch_start_s);
    e->num("epoch_end_s", ec.epoch_end_s);
    e->num("reject_threshold_uv", ec.reject_threshold_uv);
    e->num("band_low_hz", ec.band_low_hz);
    e->num("band_high_hz", ec.band_high_hz);
    e->integer("filter_order", ec.filter_order);
    e->num("p1_start_s", ec.p1_start_s);
    e->num("p1_end_s", ec.p1_end_s);
    e->finish();
  }
  root.finish();

  lc.echt.band.sample_rate = fs;
  lc.preprocess.sample_rate = fs;
  c.validate();
  return c;
}

SessionConfig load_session_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_session_config(ss.str(), path.string());
}

std::string to_json_text(const SessionConfig& c) {
  const auto& sc = c.simulation;
  const auto& lc = c.loop;
  const auto& t = sc.erp;
  json j;
  j["seed"] = c.seed;
  j["sample_rate_hz"] = c.sample_rate_hz;
  j["simulation"] = {
      {"duration_s", sc.duration_s},
      {"noise_seed", sc.noise_seed},
      {"side_channel_attenuation", sc.side_channel_attenuation},
      {"oscillator",
       {{"base_freq_hz", sc.oscillator.base_freq_hz},
        {"amplitude_uv", sc.oscillator.amplitude_uv},
        {"am_depth", sc.oscillator.am_depth},
        {"am_rate_hz", sc.oscillator.am_rate_hz},
        {"freq_jitter_hz", sc.oscillator.freq_jitter_hz},
        {"initial_phase_deg", opt(sc.oscillator.initial_phase_deg)},
        {"seed", sc.oscillator.seed}}},
      {"noise",
       {{"alpha_snr_db", opt(sc.noise.alpha_snr_db)},
        {"level_uv", sc.noise.level_uv},
        {"snr_band_half_width_hz", sc.noise.snr_band_half_width_hz}}},
      {"blinks", {{"times_s", sc.blink_times_s}, {"peak_uv", sc.blink_peak_uv}}},
      {"erp",
       {{"stim_times_s", sc.erp_stim_times_s},
        {"p1_latency_s", t.p1_latency_s},
        {"p1_amplitude_uv", t.p1_amplitude_uv},
        {"p1_width_s", t.p1_width_s},
        {"n1_delay_s", t.n1_delay_s},
        {"n1_amplitude_uv", t.n1_amplitude_uv},
        {"n1_width_s", t.n1_width_s},
        {"phase_dependent", t.phase_dependent},
        {"post_stim_alpha_gain_peak", t.post_stim_alpha_gain_peak},
        {"post_stim_alpha_gain_trough", t.post_stim_alpha_gain_trough},
        {"gain_horizon_s", t.gain_horizon_s}}}};
  j["echt"] = {{"window_samples", lc.echt.window_samples},
               {"center_hz", lc.echt.band.center_hz},
               {"half_bandwidth_hz", lc.echt.band.half_bandwidth_hz},
               {"order", lc.echt.band.order}};
  j["preprocess"] = {{"low_hz", lc.preprocess.low_hz()}, {"high_hz", lc.preprocess.high_hz()}, {"order", lc.preprocess.order}};
  j["scheduler"] = {{"condition", std::string(loop::to_string(lc.scheduler.condition))},
                    {"onset_phase_deg", lc.scheduler.onset_phase_deg},
                    {"offset_phase_deg", lc.scheduler.offset_phase_deg},
                    {"session_duration_s", opt(c.session_duration_s)},
                    {"min_inter_onset_s", lc.scheduler.min_inter_onset_s},
                    {"warmup_s", lc.scheduler.warmup_s},
                    {"p1_latency_s", c.p1_latency_s},
                    {"erp_target_phase_deg", opt(c.erp_target_phase_deg)}};
  const auto& st = lc.scheduler.stimulus;
  j["stimulus"] = {{"pulse_duration_s", st.pulse_duration_s},
                   {"pulse_level_db_spl", st.pulse_level_db_spl},
                   {"background_level_db_spl", st.background_level_db_spl},
                   {"snr_db", st.snr_db}};
  j["latency"] = {{"pipeline_delay_s", lc.latency.pipeline_delay_s},
                  {"extra_output_delay_s", lc.latency.extra_output_delay_s},
                  {"compensate", lc.latency.compensate}};
  j["channels"] = {{"rms_window_s", lc.channels.rms_window_s},
                   {"switch_threshold_uv", lc.channels.switch_threshold_uv},
                   {"initial_channel", lc.channels.initial_channel}};
  j["tracking"] = {{"phase_correction", std::string(correction_name(lc.correction))},
                   {"freq_smoothing_s", lc.freq_smoothing_s},
                   {"log_phase", lc.log_phase}};
  const auto& ic = c.iaf;
  j["iaf"] = {{"n_tapers", ic.spectrogram.n_tapers},     {"window_s", ic.spectrogram.window_s},
              {"step_s", ic.spectrogram.step_s},         {"time_bandwidth", ic.spectrogram.time_bandwidth},
              {"nfft", ic.spectrogram.nfft},             {"fit_low_hz", ic.fit_low_hz},
              {"fit_high_hz", ic.fit_high_hz},           {"search_low_hz", ic.search_low_hz},
              {"search_high_hz", ic.search_high_hz},     {"floor_factor", ic.floor_factor},
              {"min_duration_s", ic.min_duration_s}};
  const auto& ec = c.erp;
  j["erp"] = {{"epoch_start_s", ec.epoch_start_s}, {"epoch_end_s", ec.epoch_end_s},
              {"reject_threshold_uv", ec.reject_threshold_uv}, {"band_low_hz", ec.band_low_hz},
              {"band_high_hz", ec.band_high_hz}, {"filter_order", ec.filter_order},
              {"p1_start_s", ec.p1_start_s}, {"p1_end_s", ec.p1_end_s}};
  return j.dump(2) + "\n";
}

loop::LoopConfig resolve_loop(const SessionConfig& cfg, double input_duration_s) {
  loop::LoopConfig lc = cfg.loop;
  lc.scheduler.session_duration_s = cfg.session_duration_s.value_or(input_duration_s);
  lc.validate();
  return lc;
}

}  // namespace alphaloop::io
