// SPDX-License-Identifier: Apache-2.0
#include "xrsim/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <cmath>
#include <thread>

#include "xrsim/deployment.hpp"
#include "xrsim/traffic.hpp"

namespace xrsim {

namespace {

struct FrameProgress {
  std::int64_t delivered_bits = 0;
  double completion_ms = std::numeric_limits<double>::quiet_NaN();
  bool undeliverable = false;
};

// Engine view of one UE: traffic cursor, link adaptation state, KPIs.
struct UeState {
  int global_id = -1;
  int cell = -1;
  int local_id = -1;
  FlowType flow = FlowType::Xr;

  std::vector<XrFrame> frames;
  std::size_t next_arrival = 0;
  std::vector<FrameProgress> progress;

  OllaState olla;
  CqiReport cqi;
  bool has_cqi = false;
  std::vector<CqiReport> cqi_in_flight;
  int cqi_phase = 0;
  std::vector<double> filt_interf_mw;  // EWMA of measured other-cell power per RBG
  bool filt_valid = false;

  std::int64_t delivered_bits = 0;  // post-warm-up
  std::vector<float> sinr_samples;
};

std::uint16_t mask_of(const std::vector<int>& ids) {
  std::uint16_t m = 0;
  for (int i : ids) m |= static_cast<std::uint16_t>(1u << i);
  return m;
}

std::uint32_t rbg_mask_of(const std::vector<int>& rbgs) {
  std::uint32_t m = 0;
  for (int r : rbgs) m |= 1u << r;
  return m;
}

}  // namespace

RunResult run(const ScenarioConfig& cfg, std::uint64_t seed, RunTrace* trace) {
  validate_or_throw(cfg);

  const McsTable mcs_table = make_mcs_table(cfg.calibration.shannon_gap_db);
  const Deployment dep = generate_layout(cfg, seed);
  const RadioContext radio = make_radio_context(cfg);
  FadingField fading(cfg, dep, seed);
  const CounterRng traffic_rng(seed, RngStream::Traffic);
  const CounterRng error_rng(seed, RngStream::Errors);

  const int n_cells = dep.n_cells();
  const int n_rbg = cfg.n_rbg();
  const int total_slots = cfg.total_slots();
  const double slot_ms = cfg.slot_ms();
  const double symbol_ms = cfg.symbol_ms();
  const double sim_end_ms = total_slots * slot_ms;
  const double warmup_ms = cfg.warmup_slots * slot_ms;
  const int cqi_period = cfg.cqi_period_slots();

  // per-cell MAC with local UE ordering = global id order (XR before eMBB)
  std::vector<std::vector<int>> cell_ues(n_cells);
  for (const UeInfo& ue : dep.ues) cell_ues[ue.serving_cell].push_back(ue.ue_id);

  std::vector<CellMac> macs;
  macs.reserve(n_cells);
  std::vector<UeState> ues(dep.n_ues());
  for (int c = 0; c < n_cells; ++c) {
    std::vector<FlowType> flows;
    for (int gid : cell_ues[c]) flows.push_back(dep.ues[gid].flow);
    macs.emplace_back(cfg, std::move(flows));
    for (int local = 0; local < static_cast<int>(cell_ues[c].size()); ++local) {
      const int gid = cell_ues[c][local];
      UeState& u = ues[gid];
      u.global_id = gid;
      u.cell = c;
      u.local_id = local;
      u.flow = dep.ues[gid].flow;
      u.olla = make_olla(cfg.olla, cfg.harq);
      u.cqi_phase = static_cast<int>(dep.ues[gid].stable_id % cqi_period);
      if (u.flow == FlowType::Xr) {
        // streams start unsynchronized: random phase within one frame period
        const double phase =
            traffic_rng.uniform(gid, 0xFFFFFFFFULL) * 1000.0 / cfg.xr_flow.fps;
        u.frames = generate_frames(cfg.xr_flow, sim_end_ms, traffic_rng, gid, phase);
        u.progress.resize(u.frames.size());
      }
    }
  }

  std::vector<CellRunRecord> cell_records(n_cells);
  ActivityMap activity(n_cells, n_rbg);
  std::vector<SchedulingDecision> decisions(n_cells);
  std::vector<double> rbg_sinr;
  rbg_sinr.reserve(n_rbg);

  // Deliver the payload slice of one acked/dead CBG to its frames.
  // CBG i spans TB bits [offset, offset+len); segments cover [0, payload).
  auto for_each_segment_overlap = [](const TbDescriptor& tb, int cbg,
                                     auto&& fn) {
    std::int64_t cbg_begin = 0;
    for (int i = 0; i < cbg; ++i) cbg_begin += tb.cbg_bits[i];
    const std::int64_t cbg_end = cbg_begin + tb.cbg_bits[cbg];
    std::int64_t seg_begin = 0;
    for (const Segment& seg : tb.segments) {
      const std::int64_t seg_end = seg_begin + seg.bits;
      const std::int64_t lo = std::max(cbg_begin, seg_begin);
      const std::int64_t hi = std::min(cbg_end, seg_end);
      if (hi > lo) fn(seg, hi - lo);
      seg_begin = seg_end;
      if (seg_begin >= cbg_end) break;
    }
  };

  for (int slot = 0; slot < total_slots; ++slot) {
    fading.advance_to(slot);
    const double slot_start_ms = slot * slot_ms;
    const bool in_stats = slot >= cfg.warmup_slots;

    // 1. XR frame arrivals reaching the gNB queues
    for (UeState& u : ues) {
      while (u.next_arrival < u.frames.size() &&
             u.frames[u.next_arrival].arrival_time_ms <= slot_start_ms) {
        macs[u.cell].queue(u.local_id).push(u.frames[u.next_arrival]);
        ++u.next_arrival;
      }
    }

    // 2. reveal HARQ feedback due this slot
    for (int c = 0; c < n_cells; ++c) {
      for (int pid : macs[c].due_feedback(slot)) {
        const HarqProcess& p = macs[c].process(pid);
        const std::vector<bool> outcome = p.flight_outcome;
        const FeedbackResult res = macs[c].process_feedback(pid, outcome, slot);
        UeState& u = ues[cell_ues[c][p.ue_id]];
        if (res.was_first_tx) olla_update(u.olla, outcome);
        if (res.discarded) {
          // HARQ exhausted: the failed CBGs' bytes are lost, frames touched
          // by them can never complete; purge their queued remainder
          for (int cbg : p.failed_cbgs()) {
            for_each_segment_overlap(p.tb, cbg, [&](const Segment& seg, std::int64_t) {
              if (seg.frame_seq < 0) return;
              if (!u.progress[seg.frame_seq].undeliverable) {
                u.progress[seg.frame_seq].undeliverable = true;
                macs[c].queue(p.ue_id).purge_frame(seg.frame_seq);
              }
            });
          }
        }
        if (res.closed || res.discarded) macs[c].erase_process(pid);
      }
    }

    const SlotFormat fmt = slot_format(cfg, slot);
    const bool dl_slot = fmt.data_symbols > 0;

    // 3. all cells schedule against their own state
    activity.clear();
    if (dl_slot) {
      for (int c = 0; c < n_cells; ++c) {
        std::vector<int> mcs_by_ue(cell_ues[c].size(), 0);
        for (int local = 0; local < static_cast<int>(cell_ues[c].size()); ++local) {
          UeState& u = ues[cell_ues[c][local]];
          // promote reports that have arrived at the gNB
          for (const CqiReport& r : u.cqi_in_flight) {
            if (r.slot_available <= slot &&
                (!u.has_cqi || r.slot_measured > u.cqi.slot_measured)) {
              u.cqi = r;
              u.has_cqi = true;
            }
          }
          std::erase_if(u.cqi_in_flight,
                        [&](const CqiReport& r) { return r.slot_available <= slot; });
          if (u.has_cqi) mcs_by_ue[local] = select_mcs(u.cqi, u.olla, mcs_table).index;
        }
        decisions[c] = macs[c].allocate(slot, fmt, mcs_table, mcs_by_ue);
        for (const Grant& g : decisions[c].grants)
          for (int r : g.rbgs) activity.set(c, r);
      }

      // 4. evaluate every grant under the joint interference picture
      const FeedbackTiming timing = feedback_timing(cfg, slot);
      const double decode_ms = (slot * 14.0 + fmt.dl_end_symbol + cfg.ue_rx_proc_symbols) * symbol_ms;
      for (int c = 0; c < n_cells; ++c) {
        for (const Grant& g : decisions[c].grants) {
          const int gid = cell_ues[c][g.ue_id];
          UeState& u = ues[gid];
          rbg_sinr.clear();
          for (int r : g.rbgs) rbg_sinr.push_back(sinr_db(radio, dep, fading, activity, gid, r));
          const double eff_db = effective_sinr_db(rbg_sinr);
          if (in_stats) u.sinr_samples.push_back(static_cast<float>(eff_db));

          HarqProcess& p = macs[c].process(g.process_id);
          const McsEntry& mcs = mcs_table[g.mcs_index];
          const double eff_lin = std::pow(10.0, eff_db / 10.0);
          std::vector<bool> ok(g.cbgs.size());
          for (std::size_t i = 0; i < g.cbgs.size(); ++i) {
            const int cbg = g.cbgs[i];
            const double acc_db = 10.0 * std::log10(p.cbg_sinr_lin[cbg] + eff_lin);
            const double p_err = blep(acc_db, mcs, cfg.calibration.blep_slope);
            const double draw = error_rng.uniform(static_cast<std::uint64_t>(c) << 32 | p.process_id,
                                                  cbg, p.tx_count);
            ok[i] = draw >= p_err;
            if (ok[i]) {
              // UE holds these bytes from decode time on
              for_each_segment_overlap(p.tb, cbg, [&](const Segment& seg, std::int64_t bits) {
                if (decode_ms >= warmup_ms) u.delivered_bits += bits;
                if (seg.frame_seq < 0) return;
                FrameProgress& fp = u.progress[seg.frame_seq];
                fp.delivered_bits += bits;
                if (fp.delivered_bits >= u.frames[seg.frame_seq].size_bits &&
                    std::isnan(fp.completion_ms))
                  fp.completion_ms = decode_ms;
              });
            }
          }
          macs[c].on_transmission_evaluated(g.process_id, eff_db, ok, timing.ready_slot);

          if (trace) {
            trace->grants.push_back({slot, c, gid, g.process_id, g.tier, g.mcs_index,
                                     g.n_prb, rbg_mask_of(g.rbgs), g.is_retx,
                                     mask_of(g.cbgs)});
            std::uint16_t outcome_mask = 0;
            for (std::size_t i = 0; i < g.cbgs.size(); ++i)
              if (ok[i]) outcome_mask |= static_cast<std::uint16_t>(1u << g.cbgs[i]);
            trace->harq.push_back({slot, c, g.process_id, gid, p.tx_count,
                                   mask_of(g.cbgs), outcome_mask, eff_db,
                                   p.cbg_sinr_lin[g.cbgs.front()]});
          }
        }
        if (trace) {
          int min_need = 0;
          for (const auto& [pid, need] : decisions[c].deferred_retx)
            min_need = min_need == 0 ? need : std::min(min_need, need);
          int n23 = 0;
          for (const Grant& g : decisions[c].grants) n23 += g.tier > 1 ? 1 : 0;
          trace->tiers.push_back({slot, c, decisions[c].free_rbgs_after, n23, min_need});
        }

        if (in_stats) {
          std::int64_t granted = 0;
          for (const Grant& g : decisions[c].grants) granted += g.n_prb;
          cell_records[c].granted_prb_slots += granted;
          cell_records[c].available_prb_slots += cfg.n_prb;
        }
      }

      // 5. CQI measurement from this slot's reference signals. The UE
      // filters the measured other-cell power across occasions; at
      // fractional load the filtered level tracks how often neighbors
      // transmit, which keeps the reports optimistic relative to full load.
      const double cqi_alpha =
          cfg.calibration.cqi_filter_slots > 0
              ? std::exp(-static_cast<double>(cqi_period) / cfg.calibration.cqi_filter_slots)
              : 0.0;
      for (UeState& u : ues) {
        if ((slot - u.cqi_phase) % cqi_period != 0) continue;
        if (u.filt_interf_mw.empty()) u.filt_interf_mw.assign(n_rbg, 0.0);
        rbg_sinr.clear();
        for (int r = 0; r < n_rbg; ++r) {
          const double inst = interference_mw(radio, dep, fading, activity, u.global_id, r);
          // envelope tracker: rises instantly with a new interference peak,
          // decays slowly while neighbors stay quiet
          const double decayed =
              u.filt_valid ? cqi_alpha * u.filt_interf_mw[r] + (1.0 - cqi_alpha) * inst
                           : inst;
          u.filt_interf_mw[r] = std::max(inst, decayed);
          const double s = serving_power_mw(radio, dep, fading, u.global_id, r);
          rbg_sinr.push_back(10.0 * std::log10(radio.cap_sinr_lin(
                                 s / (u.filt_interf_mw[r] + radio.noise_per_prb_mw))));
        }
        u.filt_valid = true;
        const double wideband = effective_sinr_db(rbg_sinr);
        u.cqi_in_flight.push_back(
            make_cqi(u.global_id, slot, wideband, feedback_timing(cfg, slot).ready_slot));
      }
    }
  }

  // ---- package results ----
  RunResult result;
  result.seed = seed;
  result.sim_end_ms = sim_end_ms;
  result.warmup_ms = warmup_ms;
  result.stats_window_s = (sim_end_ms - warmup_ms) / 1000.0;
  for (const UeState& u : ues) {
    UeRunRecord rec;
    rec.ue_id = u.global_id;
    rec.cell = u.cell;
    rec.flow = u.flow;
    rec.delivered_bits = u.delivered_bits;
    rec.sinr_samples_db = u.sinr_samples;
    result.ues.push_back(std::move(rec));
    for (std::size_t k = 0; k < u.frames.size(); ++k) {
      const XrFrame& f = u.frames[k];
      FrameRecord fr;
      fr.cell = u.cell;
      fr.ue_id = u.global_id;
      fr.seq = f.seq;
      fr.gen_ms = f.gen_time_ms;
      fr.arrival_ms = f.arrival_time_ms;
      fr.size_bits = f.size_bits;
      fr.completion_ms = u.progress[k].completion_ms;
      fr.undeliverable = u.progress[k].undeliverable;
      result.frames.push_back(fr);
    }
  }
  result.cells = cell_records;
  return result;
}

std::vector<RunResult> run_campaign(const ScenarioConfig& cfg, int n_runs,
                                    std::uint64_t base_seed, int n_threads) {
  std::vector<RunResult> results(n_runs);
  if (n_threads <= 1) {
    for (int i = 0; i < n_runs; ++i) {
      results[i] = run(cfg, base_seed + 1 + i);
      results[i].run_index = i;
    }
    return results;
  }
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next.fetch_add(1); i < n_runs; i = next.fetch_add(1)) {
      results[i] = run(cfg, base_seed + 1 + i);
      results[i].run_index = i;
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < std::min(n_threads, n_runs); ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return results;
}

double peak_phy_throughput_mbps(const ScenarioConfig& cfg) {
  const McsTable table = make_mcs_table(cfg.calibration.shannon_gap_db);
  const McsEntry& top = table.back();
  std::int64_t bits = 0;
  double ms = 0;
  for (int slot = 0; slot < static_cast<int>(cfg.tdd_pattern.size()); ++slot) {
    const SlotFormat fmt = slot_format(cfg, slot);
    if (fmt.data_symbols > 0) bits += tb_size_bits(cfg.n_prb, fmt.data_symbols, top);
    ms += cfg.slot_ms();
  }
  return static_cast<double>(bits) / ms / 1000.0;
}

}  // namespace xrsim
