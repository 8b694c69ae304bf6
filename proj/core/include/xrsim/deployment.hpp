// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "xrsim/config.hpp"
#include "xrsim/rng.hpp"

namespace xrsim {

struct Position {
  double x = 0, y = 0, z = 0;
};

enum class FlowType : std::uint8_t { Xr, Embb };

struct UeInfo {
  int ue_id = -1;
  int serving_cell = -1;
  FlowType flow = FlowType::Xr;
  Position pos;
  // flow-scoped identity: stable across scenarios that add or remove the
  // other traffic type, so paired experiments reuse drops and fading
  std::uint64_t stable_id = 0;
};

// Per cell, per RBG: is the cell transmitting on that RBG this slot.
class ActivityMap {
 public:
  ActivityMap() = default;
  ActivityMap(int n_cells, int n_rbg)
      : n_cells_(n_cells), n_rbg_(n_rbg), flags_(static_cast<std::size_t>(n_cells) * n_rbg, 0) {}

  void clear() { std::fill(flags_.begin(), flags_.end(), std::uint8_t{0}); }
  void set(int cell, int rbg) { flags_[idx(cell, rbg)] = 1; }
  bool active(int cell, int rbg) const { return flags_[idx(cell, rbg)] != 0; }
  int n_cells() const { return n_cells_; }
  int n_rbg() const { return n_rbg_; }

 private:
  std::size_t idx(int cell, int rbg) const {
    return static_cast<std::size_t>(cell) * n_rbg_ + rbg;
  }
  int n_cells_ = 0, n_rbg_ = 0;
  std::vector<std::uint8_t> flags_;
};

// InH-style LOS path gain, negative dB. Shadowing and the serving-beam
// gain are added by the caller as appropriate for the link.
double path_gain_db(double distance_3d_m, double carrier_ghz, double shadowing_db,
                    double beamforming_gain_db);

struct Deployment {
  std::vector<Position> cells;
  std::vector<UeInfo> ues;
  // geometric link gain (pathloss + shadowing, no beam gain), [cell][ue], dB
  std::vector<std::vector<double>> link_gain_db;

  int n_cells() const { return static_cast<int>(cells.size()); }
  int n_ues() const { return static_cast<int>(ues.size()); }
};

class DeploymentError : public std::runtime_error {
 public:
  explicit DeploymentError(const std::string& what) : std::runtime_error(what) {}
};

// 2 x n/2 grid of cells centered in the hall, uniform UE drops redrawn
// until every cell serves exactly its per-cell quota (strongest-gain
// association). Throws DeploymentError if the redrop bound is exhausted.
Deployment generate_layout(const ScenarioConfig& cfg, std::uint64_t seed);

// Per-(cell,ue,rbg) block fading, AR(1) in time with the coherence set by
// the configured UE speed and carrier. Values in dB, zero mean. The field
// advances every slot so trajectories do not depend on who queries them.
class FadingField {
 public:
  // Keys each (cell, ue, rbg) process by the UE's stable identity so a
  // UE's fading trajectory survives changes to the other traffic type.
  FadingField(const ScenarioConfig& cfg, const Deployment& dep, std::uint64_t seed);
  // flow-agnostic variant for self-contained tests (identity keys)
  FadingField(const ScenarioConfig& cfg, int n_cells, int n_ues, std::uint64_t seed);

  void advance_to(int slot);
  double gain_db(int cell, int ue, int rbg) const {
    if (disabled_) return 0.0;
    return state_[(static_cast<std::size_t>(cell) * n_ues_ + ue) * n_rbg_ + rbg];
  }
  double rho_per_slot() const { return rho_; }

 private:
  void init(const ScenarioConfig& cfg, int n_cells, int n_ues,
            const std::vector<std::uint64_t>& ue_keys, std::uint64_t seed);

  bool disabled_ = false;
  int n_ues_ = 0, n_rbg_ = 0;
  int current_slot_ = -1;
  double rho_ = 0, innov_scale_ = 0, std_db_ = 0;
  CounterRng rng_;
  std::vector<float> state_;
  std::vector<std::uint64_t> keys_;  // per flat process index
};

// Doppler coherence time (~0.423 / fd) expressed as an AR(1) per-slot
// correlation coefficient.
double fading_rho_per_slot(double ue_speed_kmh, double carrier_ghz, double slot_ms);

// Link budget pieces shared by data SINR and CQI measurement.
struct RadioContext {
  double tx_power_per_prb_mw = 0;
  double noise_per_prb_mw = 0;
  double bf_gain_lin = 1.0;        // serving link only
  double irc_rejection_lin = 1.0;  // residual fraction of the strongest interferers
  double sinr_ceiling_lin = 0;     // 0 = uncapped

  double cap_sinr_lin(double sinr_lin) const {
    if (sinr_ceiling_lin <= 0) return sinr_lin;
    return 1.0 / (1.0 / sinr_lin + 1.0 / sinr_ceiling_lin);
  }
};

RadioContext make_radio_context(const ScenarioConfig& cfg);

// Received serving power and other-cell interference on one RBG (per-PRB
// linear mW; flat within the RBG). Interference sums the cells flagged
// active on that RBG.
double serving_power_mw(const RadioContext& radio, const Deployment& dep,
                        const FadingField& fading, int ue, int rbg);
double interference_mw(const RadioContext& radio, const Deployment& dep,
                       const FadingField& fading, const ActivityMap& activity, int ue,
                       int rbg);

// SINR on one RBG for a UE served by its associated cell.
double sinr_db(const RadioContext& radio, const Deployment& dep, const FadingField& fading,
               const ActivityMap& activity, int ue, int rbg);

}  // namespace xrsim
