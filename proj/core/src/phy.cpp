// SPDX-License-Identifier: Apache-2.0
#include "xrsim/phy.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <vector>

namespace xrsim {

namespace {

struct McsDef {
  int qm;
  int rate_x1024;  // code rate * 1024 (x2 to keep half steps exact)
};

// QPSK..256QAM ladder; rate in 2048ths so the two half-step entries stay exact.
constexpr std::array<std::pair<int, int>, kNumMcs> kMcsLadder = {{
    {2, 240},  {2, 386},  {2, 616},  {2, 898},  {2, 1204}, {4, 756},  {4, 868},
    {4, 980},  {4, 1106}, {4, 1232}, {4, 1316}, {6, 932},  {6, 1034}, {6, 1134},
    {6, 1232}, {6, 1332}, {6, 1438}, {6, 1544}, {6, 1644}, {6, 1746}, {8, 1365},
    {8, 1422}, {8, 1508}, {8, 1594}, {8, 1682}, {8, 1770}, {8, 1833}, {8, 1896},
}};

}  // namespace

McsTable make_mcs_table(double shannon_gap_db) {
  McsTable table{};
  const double gap_lin = std::pow(10.0, shannon_gap_db / 10.0);
  for (int i = 0; i < kNumMcs; ++i) {
    McsEntry& e = table[i];
    e.index = i;
    e.modulation_order = kMcsLadder[i].first;
    e.code_rate = kMcsLadder[i].second / 2048.0;
    e.se_bits_per_re = e.modulation_order * e.code_rate;
    // SINR where Shannon capacity with the gap reaches this SE
    e.snr_10pct_db = 10.0 * std::log10((std::exp2(e.se_bits_per_re) - 1.0) * gap_lin);
  }
  return table;
}

OllaState make_olla(const OllaConfig& cfg, const HarqConfig& harq) {
  OllaState s;
  s.offset_db = 0;
  s.step_down_db = cfg.step_down_db;
  const double target =
      static_cast<double>(harq.target_failed_cbg) / harq.n_cbg_per_tb;
  s.step_up_db = cfg.step_down_db * (1.0 - target) / target;
  s.clamp_db = cfg.clamp_db;
  return s;
}

double effective_sinr_db(std::span<const double> per_rbg_sinr_db) {
  assert(!per_rbg_sinr_db.empty());
  double acc = 0;
  for (double g : per_rbg_sinr_db) acc += std::log2(1.0 + std::pow(10.0, g / 10.0));
  const double eff = std::exp2(acc / static_cast<double>(per_rbg_sinr_db.size())) - 1.0;
  return 10.0 * std::log10(eff);
}

CqiReport make_cqi(int ue_id, int slot_measured, double measured_sinr_db, int slot_available) {
  CqiReport r;
  r.ue_id = ue_id;
  r.slot_measured = slot_measured;
  r.slot_available = slot_available;
  r.wideband_sinr_db = std::floor(measured_sinr_db);  // 1 dB quantization
  return r;
}

const McsEntry& select_mcs_db(double sinr_db, const OllaState& olla, const McsTable& table) {
  const double budget = sinr_db + olla.offset_db;
  const McsEntry* best = &table[0];
  for (const McsEntry& e : table)
    if (e.snr_10pct_db <= budget) best = &e;
  return *best;
}

const McsEntry& select_mcs(const CqiReport& cqi, const OllaState& olla, const McsTable& table) {
  return select_mcs_db(cqi.wideband_sinr_db, olla, table);
}

void olla_update(OllaState& olla, const std::vector<bool>& cbg_passed) {
  for (bool passed : cbg_passed) {
    if (passed)
      olla.offset_db += olla.step_down_db;
    else
      olla.offset_db -= olla.step_up_db;
  }
  olla.offset_db = std::clamp(olla.offset_db, -olla.clamp_db, olla.clamp_db);
}

double blep(double effective_sinr_db, const McsEntry& mcs, double slope_per_db) {
  // logistic anchored so blep(snr_10pct) = 0.10
  const double mid = mcs.snr_10pct_db - std::log(9.0) / slope_per_db;
  return 1.0 / (1.0 + std::exp(slope_per_db * (effective_sinr_db - mid)));
}

double combine_chase_db(std::span<const double> attempt_sinr_db) {
  assert(!attempt_sinr_db.empty());
  double lin = 0;
  for (double g : attempt_sinr_db) lin += std::pow(10.0, g / 10.0);
  return 10.0 * std::log10(lin);
}

std::int64_t tb_size_bits(int n_prb, int n_data_symbols, const McsEntry& mcs) {
  assert(n_prb >= 1);
  const double re = static_cast<double>(n_prb) * 12.0 * n_data_symbols;
  return static_cast<std::int64_t>(re * mcs.se_bits_per_re);
}

}  // namespace xrsim
