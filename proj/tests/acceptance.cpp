// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: one pass/fail line per criterion. Exact checks first,
// then trend checks driven by a shared multi-point campaign (M = 5 runs
// per point). Exit code is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "xrsim/campaign.hpp"
#include "xrsim/engine.hpp"
#include "xrsim/traffic.hpp"

using namespace xrsim;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int criterion, const char* name, bool pass, const std::string& detail) {
  std::printf("[%s] C%-2d %s: %s\n", pass ? "PASS" : "FAIL", criterion, name, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof(buf), f, args);
  va_end(args);
  return buf;
}

// ---------------------------------------------------------------------------
// C1: determinism + runtime

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion_1() {
  ScenarioConfig cfg = default_scenario();  // 12 cells, 5 XR + 1 eMBB per cell
  cfg.n_runs = 1;
  cfg.rng_seed = 424242;

  const auto t0 = std::chrono::steady_clock::now();
  const auto runs1 = run_campaign(cfg, 1, cfg.rng_seed, 1);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const fs::path dir1 = fs::temp_directory_path() / "xrsim_acc_run1";
  const fs::path dir2 = fs::temp_directory_path() / "xrsim_acc_run2";
  write_run_files(dir1.string(), cfg, runs1);
  const auto runs2 = run_campaign(cfg, 1, cfg.rng_seed, 1);
  write_run_files(dir2.string(), cfg, runs2);

  bool identical = true;
  for (const char* f : {"config.cfg", "frames.csv", "ues.csv", "cells.csv", "summary.json"})
    identical = identical && read_file(dir1 / f) == read_file(dir2 / f) &&
                !read_file(dir1 / f).empty();
  fs::remove_all(dir1);
  fs::remove_all(dir2);

  report(1, "determinism & runtime", identical && secs < 60.0,
         fmt("result files byte-identical=%s, 12000-slot run took %.1f s (< 60 s)",
             identical ? "yes" : "NO", secs));
}

// ---------------------------------------------------------------------------
// C2: traffic model

// numeric-integration CDF oracle, independent of the sampler
struct TnOracle {
  TruncGaussParams p;
  double norm;
  explicit TnOracle(const TruncGaussParams& params) : p(params) {
    norm = integrate(p.min, p.max);
  }
  double density(double x) const {
    const double z = (x - p.mean) / p.std;
    return std::exp(-0.5 * z * z);
  }
  double integrate(double a, double b) const {
    const int n = 4000;
    const double h = (b - a) / n;
    double acc = density(a) + density(b);
    for (int i = 1; i < n; ++i) acc += density(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
  }
  double cdf(double x) const {
    if (x <= p.min) return 0;
    if (x >= p.max) return 1;
    return integrate(p.min, x) / norm;
  }
};

void criterion_2() {
  const CounterRng rng(77, RngStream::Traffic);
  bool pass = true;
  std::string detail;

  for (double sdr : {30.0, 45.0}) {
    const XrFlowConfig flow = xr_flow_for_sdr(sdr);
    std::int64_t bits = 0;
    bool jitter_ok = true;
    for (const XrFrame& f : generate_frames(flow, 60000.0, rng, 0)) {
      bits += f.size_bits;
      const double j = f.arrival_time_ms - f.gen_time_ms;
      jitter_ok = jitter_ok && j >= flow.jitter_ms.min && j <= flow.jitter_ms.max;
    }
    const double mbps = static_cast<double>(bits) / 60000.0 / 1000.0;
    pass = pass && jitter_ok && std::abs(mbps - sdr) <= 0.02 * sdr;
    detail += fmt("%.0f Mbps flow measured %.2f; ", sdr, mbps);
  }

  const TruncGaussParams size45{93.75, 9.8, 46.875, 140.625};
  const TnOracle oracle(size45);
  std::vector<double> samples(100000);
  for (std::size_t i = 0; i < samples.size(); ++i)
    samples[i] = sample_trunc_gauss(size45, rng, i, 5);
  std::sort(samples.begin(), samples.end());
  double ks = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = oracle.cdf(samples[i]);
    ks = std::max(ks, std::abs((i + 1.0) / samples.size() - f));
    ks = std::max(ks, std::abs(static_cast<double>(i) / samples.size() - f));
  }
  pass = pass && ks < 0.01;
  detail += fmt("frame-size KS distance %.4f (< 0.01)", ks);
  report(2, "traffic model", pass, detail);
}

// ---------------------------------------------------------------------------
// C3: scheduler share + strict tiers

void criterion_3() {
  const ScenarioConfig cfg = default_scenario();  // w_xr : w_embb = 20 : 1
  const McsTable table = make_mcs_table(cfg.calibration.shannon_gap_db);
  CellMac mac(cfg, {FlowType::Xr, FlowType::Embb});
  XrFrame huge;
  huge.seq = 0;
  huge.size_bits = std::int64_t{1} << 52;  // permanently backlogged
  mac.queue(0).push(huge);
  const std::vector<int> mcs{27, 27};

  std::int64_t xr = 0, embb = 0;
  bool tiers_clean = true, exclusive = true, work_conserving = true;
  int slot = 0;
  for (int n = 0; n < 10000; ++n, ++slot) {
    SlotFormat fmt = slot_format(cfg, slot);
    while (fmt.data_symbols == 0) fmt = slot_format(cfg, ++slot);
    const SchedulingDecision dec = mac.allocate(slot, fmt, table, mcs);
    std::uint32_t mask = 0;
    int granted = 0;
    for (const Grant& g : dec.grants) {
      (g.ue_id == 0 ? xr : embb) += static_cast<int>(g.rbgs.size());
      tiers_clean = tiers_clean && g.tier >= 2 && !g.is_retx;
      for (int r : g.rbgs) {
        exclusive = exclusive && !(mask & (1u << r));
        mask |= 1u << r;
        ++granted;
      }
      mac.erase_process(g.process_id);  // no PHY: retransmissions never arise
    }
    tiers_clean = tiers_clean && dec.deferred_retx.empty();
    work_conserving = work_conserving && granted == cfg.n_rbg();
  }
  const double share = static_cast<double>(xr) / static_cast<double>(embb);
  const bool share_ok = std::abs(share - 20.0) <= 0.01 * 20.0;
  report(3, "WRR share & strict tiers",
         share_ok && tiers_clean && exclusive && work_conserving,
         fmt("RBG share %.3f:1 (20:1 +-1%%), tier trace clean=%s, exclusive=%s, full=%s",
             share, tiers_clean ? "yes" : "NO", exclusive ? "yes" : "NO",
             work_conserving ? "yes" : "NO"));
}

// ---------------------------------------------------------------------------
// C4: HARQ trace audit

void criterion_4() {
  ScenarioConfig cfg = default_scenario();
  cfg.n_xr_ue_per_cell = 3;
  cfg.n_embb_ue_per_cell = 1;
  RunTrace trace;
  run(cfg, 31, &trace);

  int max_tx = 0;
  bool cover_exact = true, first_covers_all = true;
  bool chase_exact = true;
  bool tier_dominance = true;

  struct ProcState {
    std::uint16_t expected_failed = 0;
    bool seen = false;
    double lin_sum = 0;
    int last_slot = -1;
  };
  std::map<std::pair<int, int>, ProcState> procs;

  long retx_rows = 0;
  bool causal = true;
  for (const HarqTraceRow& h : trace.harq) {
    max_tx = std::max(max_tx, h.tx_count);
    ProcState& st = procs[{h.cell, h.process_id}];
    if (!st.seen) {
      st.seen = true;
      // initial transmission covers CBGs 0..n-1 contiguously
      first_covers_all = first_covers_all &&
                         h.cbg_mask == (1u << __builtin_popcount(h.cbg_mask)) - 1u;
    } else {
      ++retx_rows;
      cover_exact = cover_exact && h.cbg_mask == st.expected_failed;
      // no retransmission before the previous attempt's feedback could arrive
      causal = causal && h.slot >= feedback_timing(cfg, st.last_slot).ready_slot;
    }
    st.expected_failed = h.cbg_mask & static_cast<std::uint16_t>(~h.outcome_mask);
    st.lin_sum += std::pow(10.0, h.attempt_sinr_db / 10.0);
    st.last_slot = h.slot;
    chase_exact = chase_exact &&
                  std::abs(h.combined_sinr_lin - st.lin_sum) <= 1e-9 * st.lin_sum;
  }
  for (const TierAuditRow& t : trace.tiers) {
    if (t.min_deferred_need > 0 && t.free_rbgs_after > 0)
      tier_dominance = tier_dominance && t.min_deferred_need > t.free_rbgs_after;
  }

  report(4, "HARQ audit",
         max_tx <= 4 && cover_exact && first_covers_all && chase_exact && tier_dominance &&
             causal && retx_rows > 100,
         fmt("max tx %d (<=4), %ld retx grants cover exactly the failed set=%s, "
             "chase sum exact to 1e-9=%s, causal=%s, no tier violation=%s",
             max_tx, retx_rows, cover_exact ? "yes" : "NO", chase_exact ? "yes" : "NO",
             causal ? "yes" : "NO", tier_dominance ? "yes" : "NO"));
}

// ---------------------------------------------------------------------------
// C5: OLLA fixed point

void criterion_5() {
  const ScenarioConfig cfg = default_scenario();
  const McsTable table = make_mcs_table(cfg.calibration.shannon_gap_db);
  OllaState olla = make_olla(cfg.olla, cfg.harq);
  const CounterRng rng(5151, RngStream::Errors);
  const double stationary_sinr_db = 10.0;
  int fails = 0, total = 0;
  for (int tb = 0; tb < 2500; ++tb) {  // 20000 first-transmission CBGs
    const McsEntry& mcs = select_mcs(make_cqi(0, 0, stationary_sinr_db, 1), olla, table);
    const double p_err = blep(stationary_sinr_db, mcs, cfg.calibration.blep_slope);
    std::vector<bool> ok(8);
    for (int c = 0; c < 8; ++c) {
      ok[c] = rng.uniform(tb, c) >= p_err;
      fails += ok[c] ? 0 : 1;
      ++total;
    }
    olla_update(olla, ok);
  }
  const double fraction = static_cast<double>(fails) / total;
  report(5, "OLLA failure target", fraction >= 0.20 && fraction <= 0.30,
         fmt("first-transmission CBG failure fraction %.3f over %d CBGs (target [0.20, 0.30])",
             fraction, total));
}

// ---------------------------------------------------------------------------
// C6: frame structure arithmetic

void criterion_6() {
  const ScenarioConfig cfg = default_scenario();
  int symbols = 0;
  for (int s = 0; s < 5; ++s) symbols += slot_format(cfg, s).data_symbols;
  const double peak = peak_phy_throughput_mbps(cfg);
  report(6, "frame structure & peak rate", symbols == 48 && peak >= 465.0 && peak <= 467.0,
         fmt("data symbols per DDDSU cycle %d (= 48), peak PHY %.2f Mbps (466 +- 1)", symbols,
             peak));
}

// ---------------------------------------------------------------------------
// C7: KPI definitions

void criterion_7() {
  UeFrameOutcomes sat;
  sat.n_frames = 360;
  sat.n_on_time = 357;
  UeFrameOutcomes unsat;
  unsat.n_frames = 360;
  unsat.n_on_time = 356;
  const bool sat_ok = is_satisfied(sat) && !is_satisfied(unsat);

  const bool cap_ok = xr_capacity({{1, 1.0}, {2, 0.90}, {3, 0.85}}).capacity == 2 &&
                      xr_capacity({{1, 0.89}}).capacity == 0;

  const double margin = binomial_ci(360, 0.99, 0.99);
  const bool ci_ok = std::abs(margin - 0.0135) <= 0.0001;

  report(7, "KPI definitions", sat_ok && cap_ok && ci_ok,
         fmt("357/360 satisfied & 356/360 not=%s, capacity bar at 90%%=%s, "
             "ci(360,0.99,99%%)=+-%.4f (1.35%% +- 0.01%%)",
             sat_ok ? "yes" : "NO", cap_ok ? "yes" : "NO", margin));
}

// ---------------------------------------------------------------------------
// shared campaign for criteria 8-13

const PointSummary* find_point(const CampaignResult& c, double sdr, int n, bool embb) {
  for (const PointSummary& p : c.points)
    if (p.point.sdr_mbps == sdr && p.point.n_xr == n && p.point.embb == embb) return &p;
  return nullptr;
}

const CapacityCurve* find_curve(const std::vector<CapacityCurve>& curves, double sdr,
                                bool embb) {
  for (const CapacityCurve& c : curves)
    if (c.sdr_mbps == sdr && c.embb == embb) return &c;
  return nullptr;
}

CampaignResult shared_campaign(int n_threads) {
  ExperimentPlan plan;
  plan.base = default_scenario();
  plan.sdr_mbps = {30, 45};
  plan.n_xr = {0, 1, 2, 3, 4, 5, 6, 7, 8};
  plan.embb = {false, true};
  plan.pdb_ms = {5, 10, 15, 20, 30};
  plan.runs_per_point = 5;
  plan.base_seed = 20;
  plan.n_threads = n_threads;
  return run_sweep(plan, [](const SweepPoint& pt, int done, int total) {
    std::printf("  campaign %2d/%2d (sdr %g, n_xr %d, embb %d)\n", done, total, pt.sdr_mbps,
                pt.n_xr, pt.embb ? 1 : 0);
    std::fflush(stdout);
  });
}

void criterion_8(const CampaignResult& campaign) {
  bool full_load_exact = true, fractional = true, increasing = true;
  for (const PointSummary& p : campaign.points) {
    if (p.point.embb)
      full_load_exact = full_load_exact && p.mean_prb_utilization == 1.0;
    else
      fractional = fractional && p.mean_prb_utilization < 1.0;
  }
  for (double sdr : {30.0, 45.0}) {
    double prev = -1;
    for (int n = 1; n <= 8; ++n) {
      const PointSummary* p = find_point(campaign, sdr, n, false);
      if (!p) continue;
      increasing = increasing && p->mean_prb_utilization > prev;
      prev = p->mean_prb_utilization;
    }
  }
  report(8, "full-load coupling", full_load_exact && fractional && increasing,
         fmt("eMBB present -> utilization exactly 1.0=%s; XR-only < 1.0=%s and increasing "
             "in N=%s",
             full_load_exact ? "yes" : "NO", fractional ? "yes" : "NO",
             increasing ? "yes" : "NO"));
}

void criterion_9(const CampaignResult& campaign) {
  const auto curves = capacity_curves(campaign);
  const CapacityCurve* c30 = find_curve(curves, 30, false);
  const CapacityCurve* c45 = find_curve(curves, 45, false);
  bool nondecreasing = true, ordered = true;
  std::string caps;
  int prev30 = -1, prev45 = -1;
  for (double pdb : campaign.pdb_ms) {
    const int k30 = c30->capacity_by_pdb.at(pdb);
    const int k45 = c45->capacity_by_pdb.at(pdb);
    nondecreasing = nondecreasing && k30 >= prev30 && k45 >= prev45;
    prev30 = k30;
    prev45 = k45;
    ordered = ordered && (k30 > 0 ? k45 < k30 : k45 == 0);
    caps += fmt("pdb%g:%d/%d ", pdb, k30, k45);
  }
  report(9, "capacity vs PDB shape", nondecreasing && ordered,
         fmt("capacity (30/45 Mbps XR-only) %s- non-decreasing=%s, 45 below 30=%s",
             caps.c_str(), nondecreasing ? "yes" : "NO", ordered ? "yes" : "NO"));
}

void criterion_10(const CampaignResult& campaign) {
  const auto curves = capacity_curves(campaign);
  const CapacityCurve* wo = find_curve(curves, 45, false);
  const CapacityCurve* w = find_curve(curves, 45, true);
  const int wo10 = wo->capacity_by_pdb.at(10), w10 = w->capacity_by_pdb.at(10);
  const int wo20 = wo->capacity_by_pdb.at(20), w20 = w->capacity_by_pdb.at(20);
  const double loss10 = wo10 > 0 ? 100.0 * (1.0 - static_cast<double>(w10) / wo10) : 0;
  const double loss20 = wo20 > 0 ? 100.0 * (1.0 - static_cast<double>(w20) / wo20) : 0;
  const bool pass =
      wo10 > 0 && wo20 > 0 && loss10 > loss20 && loss10 >= 40.0 && loss20 <= 25.0;
  report(10, "capacity-loss ordering", pass,
         fmt("45 Mbps: pdb10 %d->%d (loss %.0f%%, >= 40), pdb20 %d->%d (loss %.0f%%, <= 25)",
             wo10, w10, loss10, wo20, w20, loss20));
}

void criterion_11(const CampaignResult& campaign) {
  struct Case {
    double sdr;
    int n;
  };
  double shift[2] = {0, 0}, util[2] = {0, 0};
  bool in_band = true, have = true;
  const Case cases[2] = {{45, 4}, {30, 7}};
  std::string detail;
  for (int i = 0; i < 2; ++i) {
    const PointSummary* wo = find_point(campaign, cases[i].sdr, cases[i].n, false);
    const PointSummary* w = find_point(campaign, cases[i].sdr, cases[i].n, true);
    if (!wo || !w || wo->xr_sinr_quantiles_db.empty() || w->xr_sinr_quantiles_db.empty()) {
      have = false;
      continue;
    }
    shift[i] = wo->xr_sinr_quantiles_db[50] - w->xr_sinr_quantiles_db[50];
    util[i] = wo->mean_prb_utilization;
    in_band = in_band && shift[i] >= 3.0 && shift[i] <= 7.0;
    detail += fmt("%g Mbps/%d UE: median shift %.2f dB (XR-only util %.2f); ", cases[i].sdr,
                  cases[i].n, shift[i], util[i]);
  }
  // the scenario with lower XR-only utilization shows the larger shift
  const bool ordering = (util[0] < util[1]) == (shift[0] > shift[1]);
  report(11, "SINR median shift", have && in_band && ordering,
         detail + fmt("shifts in [3, 7] dB=%s, lower-load case shifts more=%s",
                      in_band ? "yes" : "NO", ordering ? "yes" : "NO"));
}

void criterion_12(const CampaignResult& campaign) {
  const PointSummary* base30 = find_point(campaign, 30, 0, true);
  const PointSummary* base45 = find_point(campaign, 45, 0, true);
  struct Case {
    double sdr;
    int n;
    double load;
  };
  const Case cases[3] = {{30, 1, 30}, {45, 1, 45}, {30, 3, 90}};
  bool pass = base30 && base45;
  std::string detail =
      base30 ? fmt("baseline %.0f Mbps; ", base30->mean_embb_cell_tput_mbps) : "no baseline; ";
  for (const Case& c : cases) {
    const PointSummary* p = find_point(campaign, c.sdr, c.n, true);
    if (!p || !pass) {
      pass = false;
      continue;
    }
    const double reference =
        c.sdr == 30 ? base30->mean_embb_cell_tput_mbps : base45->mean_embb_cell_tput_mbps;
    const double drop = reference - p->mean_embb_cell_tput_mbps;
    const bool satisfied = p->satisfied_fraction.at(10) >= 0.90;
    const bool band = std::abs(drop - c.load) <= 0.25 * c.load;
    pass = pass && satisfied && band;
    detail += fmt("+%g Mbps XR -> drop %.1f (+-25%%: %s, XR satisfied: %s); ", c.load, drop,
                  band ? "ok" : "NO", satisfied ? "yes" : "NO");
  }
  report(12, "one-for-one eMBB trade", pass, detail);
}

void criterion_13(const CampaignResult& campaign) {
  bool pass = true;
  std::string detail;
  for (double sdr : {30.0, 45.0}) {
    const PointSummary* wo = find_point(campaign, sdr, 1, false);
    const PointSummary* w = find_point(campaign, sdr, 1, true);
    if (!wo || !w) {
      pass = false;
      continue;
    }
    pass = pass && w->latency_p99_ms > wo->latency_p99_ms;
    detail += fmt("%g Mbps N=1: p99 %.2f ms (with eMBB) > %.2f ms (XR-only); ", sdr,
                  w->latency_p99_ms, wo->latency_p99_ms);
  }
  report(13, "delay ordering at N=1", pass, detail);
}

}  // namespace

int main(int argc, char** argv) {
  int threads = 2;
  if (argc > 1) threads = std::max(1, std::atoi(argv[1]));
  const auto t0 = std::chrono::steady_clock::now();

  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();

  std::printf("running the shared trend campaign (M=5 per point)...\n");
  const CampaignResult campaign = shared_campaign(threads);
  criterion_8(campaign);
  criterion_9(campaign);
  criterion_10(campaign);
  criterion_11(campaign);
  criterion_12(campaign);
  criterion_13(campaign);

  const double mins =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / 60.0;
  std::printf("%d/13 criteria passed in %.1f min\n", 13 - g_failures, mins);
  return g_failures;
}
