// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "xrsim/engine.hpp"

namespace xrsim {

struct SweepPoint {
  double sdr_mbps = 30;
  int n_xr = 1;
  bool embb = false;
};

// Cartesian sweep axes; PDB is a pure post-processing axis (the queueing
// dynamics never look at the deadline), so one run set serves all PDBs.
struct ExperimentPlan {
  ScenarioConfig base;
  std::vector<double> sdr_mbps{30};
  std::vector<int> n_xr{1};
  std::vector<bool> embb{false};
  std::vector<double> pdb_ms{5, 10, 15, 20, 30};
  int runs_per_point = 5;
  std::uint64_t base_seed = 1;
  int n_threads = 1;
};

struct PointSummary {
  SweepPoint point;
  int n_runs = 0;
  int n_calls = 0;                                  // XR calls pooled over runs
  std::map<double, double> satisfied_fraction;      // per PDB
  double latency_p99_ms = 0;                        // pooled XR frames
  double mean_prb_utilization = 0;
  double mean_embb_cell_tput_mbps = 0;
  std::vector<double> embb_tput_samples_mbps;       // per (run, eMBB UE)
  std::vector<double> xr_sinr_quantiles_db;         // 101-point grid, empty if no samples
  double xr_delivered_mbps = 0;                     // aggregate XR goodput per cell
};

struct CampaignResult {
  std::string base_config;                          // serialized scenario
  std::vector<double> pdb_ms;
  std::vector<PointSummary> points;
};

ScenarioConfig configure_point(const ScenarioConfig& base, const SweepPoint& pt);

PointSummary summarize_point(const ScenarioConfig& cfg, const SweepPoint& pt,
                             const std::vector<RunResult>& runs,
                             const std::vector<double>& pdb_ms);

using ProgressFn = std::function<void(const SweepPoint&, int done, int total)>;
CampaignResult run_sweep(const ExperimentPlan& plan, const ProgressFn& progress = {});

// capacity per (sdr, embb) from a campaign's points, per PDB
struct CapacityCurve {
  double sdr_mbps = 0;
  bool embb = false;
  std::map<double, int> capacity_by_pdb;
  std::map<double, std::map<int, double>> fraction_by_pdb_n;
};
std::vector<CapacityCurve> capacity_curves(const CampaignResult& campaign);

// ---- files ----
void write_campaign_json(const std::string& path, const CampaignResult& campaign);
CampaignResult read_campaign_json(const std::string& path);

// Result files of a single-scenario run command.
void write_run_files(const std::string& out_dir, const ScenarioConfig& cfg,
                     const std::vector<RunResult>& runs);
void write_layout_csv(const std::string& path, const ScenarioConfig& cfg, std::uint64_t seed);
void write_arrivals_csv(const std::string& path, const ScenarioConfig& cfg, std::uint64_t seed);
void write_grant_trace_csv(const std::string& path, const RunTrace& trace);
void write_mcs_csv(const std::string& path, double shannon_gap_db);

// Figure-shaped CSV emission from a stored campaign (report command).
void write_report_files(const std::string& out_dir, const CampaignResult& campaign);

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace xrsim
