// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace xrsim {

// Truncated Gaussian TN(mean, std, min, max), in the unit of use.
struct TruncGaussParams {
  double mean = 0;
  double std = 1;
  double min = 0;
  double max = 0;
};

struct XrFlowConfig {
  double fps = 60;
  double sdr_mbps = 30;                // offered load label, must match frame_size * fps
  TruncGaussParams frame_size_kb{62.5, 6.25, 31.25, 93.75};
  TruncGaussParams jitter_ms{0, 2, -4, 4};
  double pdb_ms = 10;
};

struct SchedulerConfig {
  int w_xr = 20;
  int w_embb = 1;
  int rbg_size_prb = 16;
};

struct HarqConfig {
  int max_retx = 3;
  int n_cbg_per_tb = 8;
  int target_failed_cbg = 2;           // OLLA target: failed CBGs per TB of n_cbg_per_tb
};

struct OllaConfig {
  double step_down_db = 0.1;           // per passed CBG; step_up = step_down * (1-t)/t
  double clamp_db = 10;
};

struct LayoutConfig {
  double hall_x_m = 120;
  double hall_y_m = 50;
  int n_cells = 12;                    // placed as 2 rows x n_cells/2 columns
  double isd_m = 20;
  double gnb_height_m = 3;
  double ue_height_m = 1.5;
  int drop_max_attempts = 1000;        // per-UE redrop bound for equal-count association
};

// Knobs substituting for the calibrated channel / link-level tables.
struct CalibrationConfig {
  double beamforming_gain_db = 17.5;     // serving-beam gain; interfering links get none
  double irc_suppression_db = 12;      // IRC-style rejection of the strongest interferer
  double shadowing_std_db = 3;
  double fading_std_db = 1.5;          // AR(1) block-fading std, dB; 0 disables fading
  double blep_slope = 5.0;             // logistic steepness, per dB
  double shannon_gap_db = 2.0;         // SE-to-SINR gap anchoring per-MCS 10% BLEP points
  double noise_figure_db = 9;
  double cqi_filter_slots = 16;        // EWMA time constant of the UE's measured
                                       // interference; 0 = instantaneous snapshots
  double sinr_ceiling_db = 30;         // post-detection cap from receiver impairments
};

struct ScenarioConfig {
  LayoutConfig layout;

  double carrier_ghz = 4;
  double bandwidth_mhz = 100;
  double scs_khz = 30;
  int n_prb = 273;
  std::string tdd_pattern = "DDDSU";
  int pdcch_symbols = 1;               // per D and S slot
  int special_slot_dl_symbols = 10;
  double tx_power_dbm = 31;
  double ue_speed_kmh = 3;
  double gnb_tx_proc_symbols = 2.75;
  double ue_rx_proc_symbols = 6;

  int n_xr_ue_per_cell = 5;
  int n_embb_ue_per_cell = 1;
  XrFlowConfig xr_flow;

  SchedulerConfig scheduler;
  HarqConfig harq;
  OllaConfig olla;
  double cqi_period_ms = 2;

  double sim_duration_s = 6;
  int n_runs = 5;
  std::uint64_t rng_seed = 1;
  int warmup_slots = 1000;             // excluded from resource/throughput/SINR stats
  bool latency_from_generation = false;  // KPI clock: frame generation vs gNB arrival

  CalibrationConfig calibration;

  // ---- derived quantities ----
  double slot_ms() const { return 15.0 / scs_khz; }
  double symbol_ms() const { return slot_ms() / 14.0; }
  int n_rbg() const;
  int prbs_in_rbg(int rbg) const;
  int cqi_period_slots() const;
  int total_slots() const;
  int slots_per_ms() const { return static_cast<int>(1.0 / slot_ms() + 0.5); }
};

struct Violation {
  std::string field;
  std::string message;
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Table-default scenario; passes validate() with zero violations.
ScenarioConfig default_scenario();

// The two reference XR flows and a generic one for other rates.
XrFlowConfig xr_flow_30mbps();
XrFlowConfig xr_flow_45mbps();
XrFlowConfig xr_flow_for_sdr(double sdr_mbps, double fps = 60);

// Flat key=value text, one assignment per line, dotted section paths,
// '#' comments. Unknown keys are rejected.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);
void apply_override(ScenarioConfig& cfg, const std::string& key, const std::string& value);
std::string serialize(const ScenarioConfig& cfg);

std::vector<Violation> validate(const ScenarioConfig& cfg);

// Convenience: throws ConfigError listing all violations.
void validate_or_throw(const ScenarioConfig& cfg);

}  // namespace xrsim
