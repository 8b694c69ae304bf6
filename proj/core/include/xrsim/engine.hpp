// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "xrsim/config.hpp"
#include "xrsim/kpi.hpp"
#include "xrsim/mac.hpp"

namespace xrsim {

// Optional per-event log for audits and scheduler debugging.
struct GrantTraceRow {
  int slot = 0;
  int cell = 0;
  int ue_global = 0;
  int process_id = 0;
  int tier = 0;
  int mcs = 0;
  int n_prb = 0;
  std::uint32_t rbg_mask = 0;
  bool retx = false;
  std::uint16_t cbg_mask = 0;
};

struct HarqTraceRow {
  int slot = 0;
  int cell = 0;
  int process_id = 0;
  int ue_global = 0;
  int tx_count = 0;                 // this transmission's ordinal (1-based)
  std::uint16_t cbg_mask = 0;       // CBGs carried
  std::uint16_t outcome_mask = 0;   // decoded CBGs among them
  double attempt_sinr_db = 0;       // this attempt's effective SINR
  double combined_sinr_lin = 0;     // Chase accumulator after this attempt (first CBG)
};

struct TierAuditRow {
  int slot = 0;
  int cell = 0;
  int free_rbgs_after = 0;
  int n_tier23_grants = 0;
  int min_deferred_need = 0;        // 0 when nothing was deferred
};

struct RunTrace {
  std::vector<GrantTraceRow> grants;
  std::vector<HarqTraceRow> harq;
  std::vector<TierAuditRow> tiers;
};

// Simulate one run: deterministic function of (config, seed).
RunResult run(const ScenarioConfig& cfg, std::uint64_t seed, RunTrace* trace = nullptr);

// Runs with seeds base_seed+1 .. base_seed+n_runs; order-stable results.
std::vector<RunResult> run_campaign(const ScenarioConfig& cfg, int n_runs,
                                    std::uint64_t base_seed, int n_threads = 1);

// Arithmetic DL ceiling: every data symbol at the top MCS across one TDD period.
double peak_phy_throughput_mbps(const ScenarioConfig& cfg);

}  // namespace xrsim
