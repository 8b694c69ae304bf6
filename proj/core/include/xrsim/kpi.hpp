// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <vector>

#include "xrsim/deployment.hpp"

namespace xrsim {

// One application frame as observed by the simulation.
struct FrameRecord {
  int cell = -1;
  int ue_id = -1;
  int seq = 0;
  double gen_ms = 0;
  double arrival_ms = 0;
  std::int64_t size_bits = 0;
  double completion_ms = std::numeric_limits<double>::quiet_NaN();  // NaN = never
  bool undeliverable = false;  // HARQ exhausted on some of its bytes

  bool delivered() const { return !std::isnan(completion_ms); }
};

// latency relative to gNB arrival (default) or frame generation;
// undelivered frames map to +infinity
double frame_latency_ms(const FrameRecord& rec, bool from_generation = false);

// Per-UE satisfaction inputs for one PDB. Frames whose deadline falls
// beyond the simulated horizon and that never completed are undecidable
// and excluded; HARQ-killed frames count as late immediately.
struct UeFrameOutcomes {
  int n_frames = 0;    // decidable frames
  int n_on_time = 0;
  std::vector<double> latency_ms;  // decided frames; +inf for late-undelivered
};

UeFrameOutcomes frame_outcomes(std::span<const FrameRecord> frames, double pdb_ms,
                               double sim_end_ms, bool from_generation = false);

// >= 99% of frames within the PDB (closed deadline: latency == PDB is on time)
bool is_satisfied(const UeFrameOutcomes& outcomes);

struct CapacityResult {
  std::map<int, double> satisfied_fraction;  // per N
  int capacity = 0;                          // max N with fraction >= 0.90
};

CapacityResult xr_capacity(const std::map<int, double>& satisfied_fraction_by_n);

// Nearest-rank empirical percentile: ceil(p*n)-th order statistic.
double percentile(std::span<const double> samples, double p);

double prb_utilization(std::int64_t granted_prb_slots, std::int64_t available_prb_slots);

double embb_throughput_mbps(std::int64_t delivered_bits, double window_s);

// Normal-approximation two-sided margin z(conf) * sqrt(p(1-p)/n).
double binomial_ci(int n, double p_hat, double confidence);

// ---------------------------------------------------------------------------
// raw per-run output consumed by the KPI aggregation and the report writer

struct UeRunRecord {
  int ue_id = -1;
  int cell = -1;
  FlowType flow = FlowType::Xr;
  std::int64_t delivered_bits = 0;        // post-warm-up, at UE decode time
  std::vector<float> sinr_samples_db;     // per-transmission effective SINR
};

struct CellRunRecord {
  std::int64_t granted_prb_slots = 0;     // post-warm-up, D/S slots only
  std::int64_t available_prb_slots = 0;
};

struct RunResult {
  int run_index = 0;
  std::uint64_t seed = 0;
  double sim_end_ms = 0;
  double warmup_ms = 0;
  double stats_window_s = 0;
  std::vector<FrameRecord> frames;
  std::vector<UeRunRecord> ues;
  std::vector<CellRunRecord> cells;
};

}  // namespace xrsim
