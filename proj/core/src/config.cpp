// SPDX-License-Identifier: Apache-2.0
#include "xrsim/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

namespace xrsim {

int ScenarioConfig::n_rbg() const {
  if (n_prb <= scheduler.rbg_size_prb) return 1;
  return n_prb / scheduler.rbg_size_prb;  // last RBG absorbs the remainder
}

int ScenarioConfig::prbs_in_rbg(int rbg) const {
  const int n = n_rbg();
  if (rbg < n - 1) return scheduler.rbg_size_prb;
  return n_prb - (n - 1) * scheduler.rbg_size_prb;
}

int ScenarioConfig::cqi_period_slots() const {
  return std::max(1, static_cast<int>(cqi_period_ms / slot_ms() + 0.5));
}

int ScenarioConfig::total_slots() const {
  return static_cast<int>(std::ceil(sim_duration_s * 1000.0 / slot_ms()));
}

ScenarioConfig default_scenario() { return ScenarioConfig{}; }

XrFlowConfig xr_flow_30mbps() {
  XrFlowConfig f;
  f.sdr_mbps = 30;
  f.frame_size_kb = TruncGaussParams{62.5, 6.25, 31.25, 93.75};
  return f;
}

XrFlowConfig xr_flow_45mbps() {
  XrFlowConfig f;
  f.sdr_mbps = 45;
  f.frame_size_kb = TruncGaussParams{93.75, 9.8, 46.875, 140.625};
  return f;
}

XrFlowConfig xr_flow_for_sdr(double sdr_mbps, double fps) {
  if (sdr_mbps == 30 && fps == 60) return xr_flow_30mbps();
  if (sdr_mbps == 45 && fps == 60) return xr_flow_45mbps();
  XrFlowConfig f;
  f.fps = fps;
  f.sdr_mbps = sdr_mbps;
  const double mean_kb = sdr_mbps * 1000.0 / (8.0 * fps);
  f.frame_size_kb = TruncGaussParams{mean_kb, mean_kb / 10.0, mean_kb / 2.0, mean_kb * 1.5};
  return f;
}

// ---------------------------------------------------------------------------
// key table

namespace {

enum class KeyType { Int, Real, Uint, Bool, Str };

struct KeyDesc {
  const char* name;
  KeyType type;
  std::function<std::string(const ScenarioConfig&)> get;
  std::function<void(ScenarioConfig&, const std::string&)> set;
};

std::string fmt_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  // trim to shortest round-trip representation
  for (int prec = 1; prec < 17; ++prec) {
    char t[40];
    std::snprintf(t, sizeof(t), "%.*g", prec, v);
    if (std::strtod(t, nullptr) == v) return t;
  }
  return buf;
}

double parse_real(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0')
    throw ConfigError("config: key '" + key + "': not a number: '" + v + "'");
  return x;
}

long long parse_int(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const long long x = std::strtoll(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0')
    throw ConfigError("config: key '" + key + "': not an integer: '" + v + "'");
  return x;
}

#define REAL_KEY(name, field)                                                    \
  KeyDesc {                                                                      \
    name, KeyType::Real, [](const ScenarioConfig& c) { return fmt_real(c.field); }, \
        [](ScenarioConfig& c, const std::string& v) { c.field = parse_real(name, v); } \
  }
#define INT_KEY(name, field)                                                     \
  KeyDesc {                                                                      \
    name, KeyType::Int, [](const ScenarioConfig& c) { return std::to_string(c.field); }, \
        [](ScenarioConfig& c, const std::string& v) {                            \
          c.field = static_cast<int>(parse_int(name, v));                        \
        }                                                                        \
  }

const std::vector<KeyDesc>& key_table() {
  static const std::vector<KeyDesc> table = {
      REAL_KEY("sim_duration_s", sim_duration_s),
      INT_KEY("n_runs", n_runs),
      KeyDesc{"rng_seed", KeyType::Uint,
              [](const ScenarioConfig& c) { return std::to_string(c.rng_seed); },
              [](ScenarioConfig& c, const std::string& v) {
                c.rng_seed = static_cast<std::uint64_t>(parse_int("rng_seed", v));
              }},
      INT_KEY("warmup_slots", warmup_slots),
      KeyDesc{"latency_clock", KeyType::Str,
              [](const ScenarioConfig& c) {
                return std::string(c.latency_from_generation ? "generation" : "arrival");
              },
              [](ScenarioConfig& c, const std::string& v) {
                if (v == "arrival")
                  c.latency_from_generation = false;
                else if (v == "generation")
                  c.latency_from_generation = true;
                else
                  throw ConfigError("config: latency_clock must be 'arrival' or 'generation'");
              }},

      REAL_KEY("layout.hall_x_m", layout.hall_x_m),
      REAL_KEY("layout.hall_y_m", layout.hall_y_m),
      INT_KEY("layout.n_cells", layout.n_cells),
      REAL_KEY("layout.isd_m", layout.isd_m),
      REAL_KEY("layout.gnb_height_m", layout.gnb_height_m),
      REAL_KEY("layout.ue_height_m", layout.ue_height_m),
      INT_KEY("layout.drop_max_attempts", layout.drop_max_attempts),

      REAL_KEY("carrier_ghz", carrier_ghz),
      REAL_KEY("bandwidth_mhz", bandwidth_mhz),
      REAL_KEY("scs_khz", scs_khz),
      INT_KEY("n_prb", n_prb),
      KeyDesc{"tdd_pattern", KeyType::Str,
              [](const ScenarioConfig& c) { return c.tdd_pattern; },
              [](ScenarioConfig& c, const std::string& v) { c.tdd_pattern = v; }},
      INT_KEY("pdcch_symbols", pdcch_symbols),
      INT_KEY("special_slot_dl_symbols", special_slot_dl_symbols),
      REAL_KEY("tx_power_dbm", tx_power_dbm),
      REAL_KEY("ue_speed_kmh", ue_speed_kmh),
      REAL_KEY("gnb_tx_proc_symbols", gnb_tx_proc_symbols),
      REAL_KEY("ue_rx_proc_symbols", ue_rx_proc_symbols),

      INT_KEY("n_xr_ue_per_cell", n_xr_ue_per_cell),
      INT_KEY("n_embb_ue_per_cell", n_embb_ue_per_cell),

      REAL_KEY("xr_flow.fps", xr_flow.fps),
      REAL_KEY("xr_flow.sdr_mbps", xr_flow.sdr_mbps),
      REAL_KEY("xr_flow.pdb_ms", xr_flow.pdb_ms),
      REAL_KEY("xr_flow.frame_size.mean_kb", xr_flow.frame_size_kb.mean),
      REAL_KEY("xr_flow.frame_size.std_kb", xr_flow.frame_size_kb.std),
      REAL_KEY("xr_flow.frame_size.min_kb", xr_flow.frame_size_kb.min),
      REAL_KEY("xr_flow.frame_size.max_kb", xr_flow.frame_size_kb.max),
      REAL_KEY("xr_flow.jitter.mean_ms", xr_flow.jitter_ms.mean),
      REAL_KEY("xr_flow.jitter.std_ms", xr_flow.jitter_ms.std),
      REAL_KEY("xr_flow.jitter.min_ms", xr_flow.jitter_ms.min),
      REAL_KEY("xr_flow.jitter.max_ms", xr_flow.jitter_ms.max),

      INT_KEY("scheduler.w_xr", scheduler.w_xr),
      INT_KEY("scheduler.w_embb", scheduler.w_embb),
      INT_KEY("scheduler.rbg_size_prb", scheduler.rbg_size_prb),

      INT_KEY("harq.max_retx", harq.max_retx),
      INT_KEY("harq.n_cbg_per_tb", harq.n_cbg_per_tb),
      INT_KEY("harq.target_failed_cbg", harq.target_failed_cbg),

      REAL_KEY("olla.step_down_db", olla.step_down_db),
      REAL_KEY("olla.clamp_db", olla.clamp_db),

      REAL_KEY("cqi_period_ms", cqi_period_ms),

      REAL_KEY("calibration.beamforming_gain_db", calibration.beamforming_gain_db),
      REAL_KEY("calibration.irc_suppression_db", calibration.irc_suppression_db),
      REAL_KEY("calibration.shadowing_std_db", calibration.shadowing_std_db),
      REAL_KEY("calibration.fading_std_db", calibration.fading_std_db),
      REAL_KEY("calibration.blep_slope", calibration.blep_slope),
      REAL_KEY("calibration.shannon_gap_db", calibration.shannon_gap_db),
      REAL_KEY("calibration.noise_figure_db", calibration.noise_figure_db),
      REAL_KEY("calibration.cqi_filter_slots", calibration.cqi_filter_slots),
      REAL_KEY("calibration.sinr_ceiling_db", calibration.sinr_ceiling_db),
  };
  return table;
}

#undef REAL_KEY
#undef INT_KEY

const KeyDesc* find_key(const std::string& name) {
  for (const auto& k : key_table())
    if (name == k.name) return &k;
  return nullptr;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

void apply_override(ScenarioConfig& cfg, const std::string& key, const std::string& value) {
  const KeyDesc* k = find_key(key);
  if (!k) throw ConfigError("config: unknown key '" + key + "'");
  k->set(cfg, trim(value));
}

ScenarioConfig parse_config(const std::string& text) {
  ScenarioConfig cfg = default_scenario();
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: line " + std::to_string(lineno) + ": expected key = value");
    apply_override(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  const auto violations = validate(cfg);
  if (!violations.empty()) {
    std::string msg = "config: validation failed:";
    for (const auto& v : violations) msg += "\n  " + v.field + ": " + v.message;
    throw ConfigError(msg);
  }
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize(const ScenarioConfig& cfg) {
  std::string out;
  for (const auto& k : key_table()) {
    out += k.name;
    out += " = ";
    out += k.get(cfg);
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// validation

namespace {

void check_tn(const std::string& field, const TruncGaussParams& p, std::vector<Violation>& out) {
  if (!(p.std > 0)) out.push_back({field + ".std", "must be > 0"});
  if (!(p.min < p.max)) out.push_back({field, "min must be < max"});
  if (!(p.min <= p.mean && p.mean <= p.max))
    out.push_back({field, "mean must lie within [min, max]"});
}

}  // namespace

std::vector<Violation> validate(const ScenarioConfig& cfg) {
  std::vector<Violation> out;

  if (!(cfg.layout.hall_x_m > 0) || !(cfg.layout.hall_y_m > 0))
    out.push_back({"layout", "hall dimensions must be positive"});
  if (cfg.layout.n_cells < 2 || cfg.layout.n_cells % 2 != 0)
    out.push_back({"layout.n_cells", "must be an even count >= 2 (2-row grid)"});
  if (!(cfg.layout.isd_m > 0)) out.push_back({"layout.isd_m", "must be > 0"});
  if (!(cfg.layout.gnb_height_m > 0) || !(cfg.layout.ue_height_m > 0))
    out.push_back({"layout", "heights must be positive"});
  if (cfg.layout.drop_max_attempts < 1)
    out.push_back({"layout.drop_max_attempts", "must be >= 1"});

  if (!(cfg.carrier_ghz > 0)) out.push_back({"carrier_ghz", "must be > 0"});
  if (!(cfg.bandwidth_mhz > 0)) out.push_back({"bandwidth_mhz", "must be > 0"});
  if (!(cfg.scs_khz > 0)) out.push_back({"scs_khz", "must be > 0"});
  if (cfg.n_prb < 1) out.push_back({"n_prb", "must be >= 1"});
  if (cfg.bandwidth_mhz == 100 && cfg.scs_khz == 30 && cfg.n_prb != 273)
    out.push_back({"n_prb", "100 MHz at 30 kHz SCS carries 273 PRBs"});
  if (12.0 * cfg.scs_khz * cfg.n_prb > cfg.bandwidth_mhz * 1000.0)
    out.push_back({"n_prb", "PRBs exceed the configured bandwidth"});

  if (cfg.tdd_pattern.size() != 5)
    out.push_back({"tdd_pattern", "pattern must have length 5"});
  bool has_dl = false, has_ul = false, bad_char = false;
  for (char c : cfg.tdd_pattern) {
    if (c == 'D' || c == 'S') has_dl = true;
    else if (c == 'U') has_ul = true;
    else bad_char = true;
  }
  if (bad_char) out.push_back({"tdd_pattern", "only 'D', 'S', 'U' slots are supported"});
  if (!has_dl) out.push_back({"tdd_pattern", "needs at least one D or S slot"});
  if (!has_ul) out.push_back({"tdd_pattern", "needs at least one U slot for feedback"});

  if (cfg.pdcch_symbols < 0 || cfg.pdcch_symbols >= 14)
    out.push_back({"pdcch_symbols", "must be in [0, 13]"});
  if (cfg.special_slot_dl_symbols <= cfg.pdcch_symbols || cfg.special_slot_dl_symbols > 14)
    out.push_back({"special_slot_dl_symbols", "must exceed PDCCH overhead and fit a slot"});
  if (!(cfg.ue_speed_kmh >= 0)) out.push_back({"ue_speed_kmh", "must be >= 0"});
  if (!(cfg.gnb_tx_proc_symbols >= 0) || !(cfg.ue_rx_proc_symbols >= 0))
    out.push_back({"processing delays", "must be >= 0"});

  if (cfg.n_xr_ue_per_cell < 0) out.push_back({"n_xr_ue_per_cell", "must be >= 0"});
  if (cfg.n_embb_ue_per_cell < 0) out.push_back({"n_embb_ue_per_cell", "must be >= 0"});

  if (!(cfg.xr_flow.fps > 0)) out.push_back({"xr_flow.fps", "must be > 0"});
  if (!(cfg.xr_flow.pdb_ms > 0)) out.push_back({"xr_flow.pdb_ms", "must be > 0"});
  check_tn("xr_flow.frame_size", cfg.xr_flow.frame_size_kb, out);
  check_tn("xr_flow.jitter", cfg.xr_flow.jitter_ms, out);
  {
    const double implied_mbps =
        cfg.xr_flow.frame_size_kb.mean * 8.0 * cfg.xr_flow.fps / 1000.0;
    if (cfg.xr_flow.sdr_mbps > 0 &&
        std::abs(implied_mbps - cfg.xr_flow.sdr_mbps) > 0.001 * cfg.xr_flow.sdr_mbps)
      out.push_back({"xr_flow.sdr_mbps",
                     "mean frame size * 8 * fps = " + fmt_real(implied_mbps) +
                         " Mbps does not match the labeled SDR"});
  }

  if (cfg.scheduler.w_xr < 1) out.push_back({"scheduler.w_xr", "must be >= 1"});
  if (cfg.scheduler.w_embb < 1) out.push_back({"scheduler.w_embb", "must be >= 1"});
  if (cfg.scheduler.rbg_size_prb < 1) out.push_back({"scheduler.rbg_size_prb", "must be >= 1"});

  if (cfg.harq.max_retx < 0) out.push_back({"harq.max_retx", "must be >= 0"});
  if (cfg.harq.n_cbg_per_tb < 1 || cfg.harq.n_cbg_per_tb > 8)
    out.push_back({"harq.n_cbg_per_tb", "must be in [1, 8]"});
  if (cfg.harq.target_failed_cbg < 1 || cfg.harq.target_failed_cbg >= cfg.harq.n_cbg_per_tb)
    out.push_back({"harq.target_failed_cbg", "must be in [1, n_cbg_per_tb)"});

  if (!(cfg.olla.step_down_db > 0)) out.push_back({"olla.step_down_db", "must be > 0"});
  if (!(cfg.olla.clamp_db > 0)) out.push_back({"olla.clamp_db", "must be > 0"});

  if (!(cfg.cqi_period_ms > 0)) out.push_back({"cqi_period_ms", "must be > 0"});

  if (!(cfg.sim_duration_s > 0)) out.push_back({"sim_duration_s", "must be > 0"});
  if (cfg.n_runs < 1) out.push_back({"n_runs", "must be >= 1"});
  if (cfg.warmup_slots < 0) out.push_back({"warmup_slots", "must be >= 0"});
  else if (cfg.warmup_slots >= cfg.total_slots())
    out.push_back({"warmup_slots", "must leave slots after warm-up"});

  if (!(cfg.calibration.shadowing_std_db >= 0))
    out.push_back({"calibration.shadowing_std_db", "must be >= 0"});
  if (!(cfg.calibration.fading_std_db >= 0))
    out.push_back({"calibration.fading_std_db", "must be >= 0"});
  if (!(cfg.calibration.blep_slope > 0))
    out.push_back({"calibration.blep_slope", "must be > 0"});
  if (!(cfg.calibration.shannon_gap_db >= 0))
    out.push_back({"calibration.shannon_gap_db", "must be >= 0"});
  if (!(cfg.calibration.cqi_filter_slots >= 0))
    out.push_back({"calibration.cqi_filter_slots", "must be >= 0"});
  if (!(cfg.calibration.irc_suppression_db >= 0))
    out.push_back({"calibration.irc_suppression_db", "must be >= 0"});
  if (!(cfg.calibration.sinr_ceiling_db >= 0))
    out.push_back({"calibration.sinr_ceiling_db", "must be >= 0 (0 disables the cap)"});

  return out;
}

void validate_or_throw(const ScenarioConfig& cfg) {
  const auto violations = validate(cfg);
  if (violations.empty()) return;
  std::string msg = "config: validation failed:";
  for (const auto& v : violations) msg += "\n  " + v.field + ": " + v.message;
  throw ConfigError(msg);
}

}  // namespace xrsim
