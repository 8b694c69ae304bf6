// SPDX-License-Identifier: Apache-2.0
#include "xrsim/campaign.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "xrsim/kpi.hpp"
#include "xrsim/traffic.hpp"

namespace xrsim {

namespace fs = std::filesystem;
using nlohmann::json;

ScenarioConfig configure_point(const ScenarioConfig& base, const SweepPoint& pt) {
  ScenarioConfig cfg = base;
  const double pdb = cfg.xr_flow.pdb_ms;
  cfg.xr_flow = xr_flow_for_sdr(pt.sdr_mbps, base.xr_flow.fps);
  cfg.xr_flow.pdb_ms = pdb;
  cfg.n_xr_ue_per_cell = pt.n_xr;
  cfg.n_embb_ue_per_cell = pt.embb ? std::max(1, base.n_embb_ue_per_cell) : 0;
  return cfg;
}

namespace {

std::vector<double> quantile_grid(std::vector<double>& samples) {
  if (samples.empty()) return {};
  std::sort(samples.begin(), samples.end());
  std::vector<double> grid(101);
  const std::size_t n = samples.size();
  for (int q = 0; q <= 100; ++q) {
    const std::size_t idx =
        std::min(n - 1, static_cast<std::size_t>(std::llround(q / 100.0 * (n - 1))));
    grid[q] = samples[idx];
  }
  return grid;
}

}  // namespace

PointSummary summarize_point(const ScenarioConfig& cfg, const SweepPoint& pt,
                             const std::vector<RunResult>& runs,
                             const std::vector<double>& pdb_ms) {
  PointSummary s;
  s.point = pt;
  s.n_runs = static_cast<int>(runs.size());

  std::map<double, int> satisfied;
  std::vector<double> latencies;
  std::vector<double> xr_sinr;
  double util_num = 0;
  int util_den = 0;
  double embb_bits = 0, xr_bits = 0, window_s = 0;
  int n_cells_total = 0;

  for (const RunResult& run : runs) {
    window_s += run.stats_window_s;
    n_cells_total += static_cast<int>(run.cells.size());
    for (const CellRunRecord& cell : run.cells) {
      if (cell.available_prb_slots > 0) {
        util_num += prb_utilization(cell.granted_prb_slots, cell.available_prb_slots);
        util_den++;
      }
    }

    // group frames per UE
    std::map<int, std::vector<FrameRecord>> by_ue;
    for (const FrameRecord& f : run.frames) by_ue[f.ue_id].push_back(f);

    for (const auto& [ue, frames] : by_ue) {
      s.n_calls++;
      for (double pdb : pdb_ms) {
        const UeFrameOutcomes oc =
            frame_outcomes(frames, pdb, run.sim_end_ms, cfg.latency_from_generation);
        if (oc.n_frames >= 1 && is_satisfied(oc)) satisfied[pdb]++;
      }
      for (const FrameRecord& f : frames)
        latencies.push_back(frame_latency_ms(f, cfg.latency_from_generation));
    }

    for (const UeRunRecord& ue : run.ues) {
      if (ue.flow == FlowType::Embb) {
        embb_bits += static_cast<double>(ue.delivered_bits);
        s.embb_tput_samples_mbps.push_back(
            embb_throughput_mbps(ue.delivered_bits, run.stats_window_s));
      } else {
        xr_bits += static_cast<double>(ue.delivered_bits);
        for (float v : ue.sinr_samples_db) xr_sinr.push_back(v);
      }
    }
  }

  for (double pdb : pdb_ms)
    s.satisfied_fraction[pdb] =
        s.n_calls > 0 ? static_cast<double>(satisfied[pdb]) / s.n_calls : 0.0;
  s.latency_p99_ms = latencies.empty() ? 0.0 : percentile(latencies, 0.99);
  s.mean_prb_utilization = util_den > 0 ? util_num / util_den : 0.0;
  // per-cell averages: total bits / (sum of run windows * cells per run)
  if (n_cells_total > 0 && window_s > 0) {
    const double total_cell_window =
        window_s * (static_cast<double>(n_cells_total) / std::max(1, s.n_runs));
    s.mean_embb_cell_tput_mbps = embb_bits / total_cell_window / 1e6;
    s.xr_delivered_mbps = xr_bits / total_cell_window / 1e6;
  }
  s.xr_sinr_quantiles_db = quantile_grid(xr_sinr);
  return s;
}

CampaignResult run_sweep(const ExperimentPlan& plan, const ProgressFn& progress) {
  CampaignResult out;
  out.base_config = serialize(plan.base);
  out.pdb_ms = plan.pdb_ms;

  std::vector<SweepPoint> points;
  for (double sdr : plan.sdr_mbps)
    for (bool embb : plan.embb)
      for (int n : plan.n_xr) {
        if (n == 0 && !embb) continue;  // empty network: nothing to measure
        points.push_back({sdr, n, embb});
      }

  int done = 0;
  for (const SweepPoint& pt : points) {
    ScenarioConfig cfg = configure_point(plan.base, pt);
    validate_or_throw(cfg);
    const auto runs = run_campaign(cfg, plan.runs_per_point, plan.base_seed, plan.n_threads);
    out.points.push_back(summarize_point(cfg, pt, runs, plan.pdb_ms));
    if (progress) progress(pt, ++done, static_cast<int>(points.size()));
  }
  return out;
}

std::vector<CapacityCurve> capacity_curves(const CampaignResult& campaign) {
  std::map<std::pair<double, bool>, CapacityCurve> curves;
  for (const PointSummary& p : campaign.points) {
    CapacityCurve& c = curves[{p.point.sdr_mbps, p.point.embb}];
    c.sdr_mbps = p.point.sdr_mbps;
    c.embb = p.point.embb;
    if (p.point.n_xr == 0) continue;
    for (const auto& [pdb, frac] : p.satisfied_fraction)
      c.fraction_by_pdb_n[pdb][p.point.n_xr] = frac;
  }
  std::vector<CapacityCurve> out;
  for (auto& [key, c] : curves) {
    for (const auto& [pdb, by_n] : c.fraction_by_pdb_n)
      c.capacity_by_pdb[pdb] = xr_capacity(by_n).capacity;
    out.push_back(std::move(c));
  }
  return out;
}

// ---------------------------------------------------------------------------
// file emission

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  return out;
}

std::string num(double v, int prec = 9) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
  return buf;
}

json point_to_json(const PointSummary& p) {
  json j;
  j["sdr_mbps"] = p.point.sdr_mbps;
  j["n_xr"] = p.point.n_xr;
  j["embb"] = p.point.embb;
  j["n_runs"] = p.n_runs;
  j["n_calls"] = p.n_calls;
  json frac = json::object();
  for (const auto& [pdb, f] : p.satisfied_fraction) frac[num(pdb)] = f;
  j["satisfied_fraction_by_pdb"] = frac;
  j["latency_p99_ms"] = p.latency_p99_ms;
  j["mean_prb_utilization"] = p.mean_prb_utilization;
  j["mean_embb_cell_tput_mbps"] = p.mean_embb_cell_tput_mbps;
  j["embb_tput_samples_mbps"] = p.embb_tput_samples_mbps;
  j["xr_sinr_quantiles_db"] = p.xr_sinr_quantiles_db;
  j["xr_delivered_mbps"] = p.xr_delivered_mbps;
  return j;
}

PointSummary point_from_json(const json& j) {
  PointSummary p;
  p.point.sdr_mbps = j.at("sdr_mbps").get<double>();
  p.point.n_xr = j.at("n_xr").get<int>();
  p.point.embb = j.at("embb").get<bool>();
  p.n_runs = j.at("n_runs").get<int>();
  p.n_calls = j.at("n_calls").get<int>();
  for (const auto& [k, v] : j.at("satisfied_fraction_by_pdb").items())
    p.satisfied_fraction[std::strtod(k.c_str(), nullptr)] = v.get<double>();
  p.latency_p99_ms = j.at("latency_p99_ms").get<double>();
  p.mean_prb_utilization = j.at("mean_prb_utilization").get<double>();
  p.mean_embb_cell_tput_mbps = j.at("mean_embb_cell_tput_mbps").get<double>();
  p.embb_tput_samples_mbps = j.at("embb_tput_samples_mbps").get<std::vector<double>>();
  p.xr_sinr_quantiles_db = j.at("xr_sinr_quantiles_db").get<std::vector<double>>();
  p.xr_delivered_mbps = j.at("xr_delivered_mbps").get<double>();
  return p;
}

}  // namespace

void write_campaign_json(const std::string& path, const CampaignResult& campaign) {
  json j;
  j["base_config"] = campaign.base_config;
  j["pdb_ms"] = campaign.pdb_ms;
  j["points"] = json::array();
  for (const PointSummary& p : campaign.points) j["points"].push_back(point_to_json(p));
  auto out = open_out(path);
  out << j.dump(1) << '\n';
}

CampaignResult read_campaign_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read '" + path + "'");
  json j = json::parse(in);
  CampaignResult c;
  c.base_config = j.at("base_config").get<std::string>();
  c.pdb_ms = j.at("pdb_ms").get<std::vector<double>>();
  for (const json& pj : j.at("points")) c.points.push_back(point_from_json(pj));
  return c;
}

void write_run_files(const std::string& out_dir, const ScenarioConfig& cfg,
                     const std::vector<RunResult>& runs) {
  fs::create_directories(out_dir);
  {
    auto out = open_out(out_dir + "/config.cfg");
    out << serialize(cfg);
  }
  {
    auto out = open_out(out_dir + "/frames.csv");
    out << "run,cell,ue,seq,gen_ms,arrival_ms,size_bits,completion_ms,latency_ms\n";
    for (const RunResult& r : runs)
      for (const FrameRecord& f : r.frames)
        out << r.run_index << ',' << f.cell << ',' << f.ue_id << ',' << f.seq << ','
            << num(f.gen_ms) << ',' << num(f.arrival_ms) << ',' << f.size_bits << ','
            << (f.delivered() ? num(f.completion_ms) : "never") << ','
            << num(frame_latency_ms(f, cfg.latency_from_generation)) << '\n';
  }
  {
    auto out = open_out(out_dir + "/ues.csv");
    out << "run,cell,ue,flow,n_frames,n_on_time,satisfied,throughput_mbps,median_sinr_db\n";
    for (const RunResult& r : runs) {
      std::map<int, std::vector<FrameRecord>> by_ue;
      for (const FrameRecord& f : r.frames) by_ue[f.ue_id].push_back(f);
      for (const UeRunRecord& ue : r.ues) {
        const bool xr = ue.flow == FlowType::Xr;
        UeFrameOutcomes oc;
        if (xr)
          oc = frame_outcomes(by_ue[ue.ue_id], cfg.xr_flow.pdb_ms, r.sim_end_ms,
                              cfg.latency_from_generation);
        double median_sinr = 0;
        if (!ue.sinr_samples_db.empty()) {
          std::vector<double> v(ue.sinr_samples_db.begin(), ue.sinr_samples_db.end());
          median_sinr = percentile(v, 0.5);
        }
        out << r.run_index << ',' << ue.cell << ',' << ue.ue_id << ','
            << (xr ? "xr" : "embb") << ',' << oc.n_frames << ',' << oc.n_on_time << ','
            << (xr ? (oc.n_frames >= 1 && is_satisfied(oc) ? "1" : "0") : "") << ','
            << num(embb_throughput_mbps(ue.delivered_bits,
                                        std::max(1e-9, r.stats_window_s))) << ','
            << num(median_sinr, 5) << '\n';
      }
    }
  }
  {
    auto out = open_out(out_dir + "/cells.csv");
    out << "run,cell,granted_prb_slots,available_prb_slots,prb_utilization\n";
    for (const RunResult& r : runs)
      for (std::size_t c = 0; c < r.cells.size(); ++c)
        out << r.run_index << ',' << c << ',' << r.cells[c].granted_prb_slots << ','
            << r.cells[c].available_prb_slots << ','
            << num(r.cells[c].available_prb_slots
                       ? prb_utilization(r.cells[c].granted_prb_slots,
                                         r.cells[c].available_prb_slots)
                       : 0.0) << '\n';
  }
  {
    // single-point campaign summary for downstream tooling
    SweepPoint pt{cfg.xr_flow.sdr_mbps, cfg.n_xr_ue_per_cell, cfg.n_embb_ue_per_cell > 0};
    std::vector<double> pdbs{cfg.xr_flow.pdb_ms};
    const PointSummary s = summarize_point(cfg, pt, runs, pdbs);
    json j = point_to_json(s);
    auto out = open_out(out_dir + "/summary.json");
    out << j.dump(1) << '\n';
  }
}

void write_layout_csv(const std::string& path, const ScenarioConfig& cfg, std::uint64_t seed) {
  const Deployment dep = generate_layout(cfg, seed);
  auto out = open_out(path);
  out << "kind,id,x_m,y_m,z_m,serving_cell\n";
  for (int c = 0; c < dep.n_cells(); ++c)
    out << "cell," << c << ',' << num(dep.cells[c].x) << ',' << num(dep.cells[c].y) << ','
        << num(dep.cells[c].z) << ",\n";
  for (const UeInfo& ue : dep.ues)
    out << (ue.flow == FlowType::Xr ? "xr_ue," : "embb_ue,") << ue.ue_id << ','
        << num(ue.pos.x) << ',' << num(ue.pos.y) << ',' << num(ue.pos.z) << ','
        << ue.serving_cell << '\n';
}

void write_arrivals_csv(const std::string& path, const ScenarioConfig& cfg,
                        std::uint64_t seed) {
  auto out = open_out(path);
  out << "flow,seq,gen_time_ms,arrival_time_ms,size_bits\n";
  const CounterRng rng(seed, RngStream::Traffic);
  const int n_flows = cfg.layout.n_cells * cfg.n_xr_ue_per_cell;
  for (int flow = 0; flow < n_flows; ++flow)
    for (const XrFrame& f :
         generate_frames(cfg.xr_flow, cfg.sim_duration_s * 1000.0, rng, flow))
      out << flow << ',' << f.seq << ',' << num(f.gen_time_ms) << ','
          << num(f.arrival_time_ms) << ',' << f.size_bits << '\n';
}

void write_grant_trace_csv(const std::string& path, const RunTrace& trace) {
  auto out = open_out(path);
  out << "slot,cell,ue,tier,rbg_start,rbg_count,rbg_mask,n_prb,mcs,kind\n";
  for (const GrantTraceRow& g : trace.grants) {
    int start = 0;
    while (start < 32 && !(g.rbg_mask & (1u << start))) ++start;
    out << g.slot << ',' << g.cell << ',' << g.ue_global << ',' << g.tier << ',' << start
        << ',' << __builtin_popcount(g.rbg_mask) << ',' << g.rbg_mask << ',' << g.n_prb
        << ',' << g.mcs << ',' << (g.retx ? "retx" : "new") << '\n';
  }
}

void write_mcs_csv(const std::string& path, double shannon_gap_db) {
  const McsTable table = make_mcs_table(shannon_gap_db);
  auto out = open_out(path);
  out << "index,modulation_order,code_rate,se_bits_per_re,snr_10pct_db\n";
  for (const McsEntry& e : table)
    out << e.index << ',' << e.modulation_order << ',' << num(e.code_rate, 6) << ','
        << num(e.se_bits_per_re, 6) << ',' << num(e.snr_10pct_db, 6) << '\n';
}

void write_report_files(const std::string& out_dir, const CampaignResult& campaign) {
  fs::create_directories(out_dir);
  const auto curves = capacity_curves(campaign);

  {
    auto out = open_out(out_dir + "/capacity_vs_pdb.csv");
    out << "sdr_mbps,embb,pdb_ms,capacity_ue_per_cell\n";
    for (const CapacityCurve& c : curves)
      for (const auto& [pdb, cap] : c.capacity_by_pdb)
        out << num(c.sdr_mbps) << ',' << (c.embb ? 1 : 0) << ',' << num(pdb) << ',' << cap
            << '\n';
  }
  {
    auto out = open_out(out_dir + "/capacity_loss_vs_pdb.csv");
    out << "sdr_mbps,pdb_ms,capacity_without_embb,capacity_with_embb,loss_percent\n";
    for (const CapacityCurve& with : curves) {
      if (!with.embb) continue;
      for (const CapacityCurve& without : curves) {
        if (without.embb || without.sdr_mbps != with.sdr_mbps) continue;
        for (const auto& [pdb, cap_wo] : without.capacity_by_pdb) {
          const auto it = with.capacity_by_pdb.find(pdb);
          if (it == with.capacity_by_pdb.end()) continue;
          const double loss =
              cap_wo > 0 ? 100.0 * (1.0 - static_cast<double>(it->second) / cap_wo) : 0.0;
          out << num(with.sdr_mbps) << ',' << num(pdb) << ',' << cap_wo << ','
              << it->second << ',' << num(loss, 5) << '\n';
        }
      }
    }
  }
  {
    auto out = open_out(out_dir + "/satisfied_fraction.csv");
    out << "sdr_mbps,embb,pdb_ms,n_xr,satisfied_fraction\n";
    for (const PointSummary& p : campaign.points)
      for (const auto& [pdb, frac] : p.satisfied_fraction)
        out << num(p.point.sdr_mbps) << ',' << (p.point.embb ? 1 : 0) << ',' << num(pdb)
            << ',' << p.point.n_xr << ',' << num(frac, 6) << '\n';
  }
  {
    auto out = open_out(out_dir + "/delay_p99_vs_n.csv");
    out << "sdr_mbps,embb,n_xr,latency_p99_ms\n";
    for (const PointSummary& p : campaign.points)
      if (p.point.n_xr > 0)
        out << num(p.point.sdr_mbps) << ',' << (p.point.embb ? 1 : 0) << ','
            << p.point.n_xr << ',' << num(p.latency_p99_ms, 6) << '\n';
  }
  {
    auto out = open_out(out_dir + "/prb_utilization_vs_n.csv");
    out << "sdr_mbps,embb,n_xr,mean_prb_utilization\n";
    for (const PointSummary& p : campaign.points)
      out << num(p.point.sdr_mbps) << ',' << (p.point.embb ? 1 : 0) << ',' << p.point.n_xr
          << ',' << num(p.mean_prb_utilization, 6) << '\n';
  }
  {
    auto out = open_out(out_dir + "/sinr_ecdf.csv");
    out << "sdr_mbps,embb,n_xr,quantile,sinr_db\n";
    for (const PointSummary& p : campaign.points)
      for (std::size_t q = 0; q < p.xr_sinr_quantiles_db.size(); ++q)
        out << num(p.point.sdr_mbps) << ',' << (p.point.embb ? 1 : 0) << ','
            << p.point.n_xr << ',' << num(q / 100.0, 3) << ','
            << num(p.xr_sinr_quantiles_db[q], 6) << '\n';
  }
  {
    auto out = open_out(out_dir + "/sinr_median_shift.csv");
    out << "sdr_mbps,n_xr,median_without_embb_db,median_with_embb_db,shift_db\n";
    for (const PointSummary& wo : campaign.points) {
      if (wo.point.embb || wo.xr_sinr_quantiles_db.empty()) continue;
      for (const PointSummary& w : campaign.points) {
        if (!w.point.embb || w.point.sdr_mbps != wo.point.sdr_mbps ||
            w.point.n_xr != wo.point.n_xr || w.xr_sinr_quantiles_db.empty())
          continue;
        const double m_wo = wo.xr_sinr_quantiles_db[50];
        const double m_w = w.xr_sinr_quantiles_db[50];
        out << num(wo.point.sdr_mbps) << ',' << wo.point.n_xr << ',' << num(m_wo, 6) << ','
            << num(m_w, 6) << ',' << num(m_wo - m_w, 6) << '\n';
      }
    }
  }
  {
    auto out = open_out(out_dir + "/embb_throughput_vs_n.csv");
    out << "sdr_mbps,n_xr,mean_embb_cell_tput_mbps\n";
    for (const PointSummary& p : campaign.points)
      if (p.point.embb)
        out << num(p.point.sdr_mbps) << ',' << p.point.n_xr << ','
            << num(p.mean_embb_cell_tput_mbps, 6) << '\n';
  }
  {
    auto out = open_out(out_dir + "/embb_throughput_ecdf.csv");
    out << "sdr_mbps,n_xr,tput_mbps\n";
    for (const PointSummary& p : campaign.points) {
      if (!p.point.embb) continue;
      std::vector<double> v = p.embb_tput_samples_mbps;
      std::sort(v.begin(), v.end());
      for (double t : v)
        out << num(p.point.sdr_mbps) << ',' << p.point.n_xr << ',' << num(t, 6) << '\n';
    }
  }
}

}  // namespace xrsim
