// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "xrsim/config.hpp"

namespace xrsim {

struct McsEntry {
  int index = 0;
  int modulation_order = 2;     // bits per symbol: 2/4/6/8
  double code_rate = 0;         // of 1.0
  double se_bits_per_re = 0;    // modulation_order * code_rate
  double snr_10pct_db = 0;      // SINR at 10% first-transmission BLEP
};

inline constexpr int kNumMcs = 28;

// 28-entry table from QPSK to 256QAM, spectral efficiency 0.2344 .. 7.4063.
// The 10%-BLEP anchors derive from the configured Shannon gap.
using McsTable = std::array<McsEntry, kNumMcs>;
McsTable make_mcs_table(double shannon_gap_db);

struct CqiReport {
  int ue_id = -1;
  int slot_measured = -1;
  int slot_available = -1;      // first slot the gNB may act on it
  double wideband_sinr_db = 0;  // quantized
};

struct OllaState {
  double offset_db = 0;
  double step_down_db = 0.1;    // applied on pass
  double step_up_db = 0.3;      // applied on fail; ratio (1-target)/target
  double clamp_db = 10;
};

OllaState make_olla(const OllaConfig& cfg, const HarqConfig& harq);

// Capacity-domain effective SINR: gamma_eff = 2^mean(log2(1+gamma_i)) - 1.
// Exact for equal inputs; always lies between min and max of the inputs.
double effective_sinr_db(std::span<const double> per_rbg_sinr_db);

// Wideband CQI with 1 dB floor quantization. slot_available must be
// supplied by the caller from the TDD feedback geometry.
CqiReport make_cqi(int ue_id, int slot_measured, double measured_sinr_db, int slot_available);

// Highest-index MCS whose 10%-BLEP SINR fits under cqi + offset; index 0 floor.
const McsEntry& select_mcs(const CqiReport& cqi, const OllaState& olla, const McsTable& table);
const McsEntry& select_mcs_db(double sinr_db, const OllaState& olla, const McsTable& table);

// Per first-transmission CBG outcome: pass nudges the offset up by
// step_down, fail pulls it down by step_up; clamped.
void olla_update(OllaState& olla, const std::vector<bool>& cbg_passed);

// Anchored logistic block-error probability. gamma is the Chase-combined
// effective SINR; the curve hits exactly 0.10 at the MCS anchor point.
double blep(double effective_sinr_db, const McsEntry& mcs, double slope_per_db);

// Chase soft combining: linear-domain sum of per-attempt effective SINRs.
double combine_chase_db(std::span<const double> attempt_sinr_db);

// floor(n_prb * 12 RE * n_data_symbols * se)
std::int64_t tb_size_bits(int n_prb, int n_data_symbols, const McsEntry& mcs);

}  // namespace xrsim
