// SPDX-License-Identifier: Apache-2.0
#include "xrsim/mac.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace xrsim {

namespace {
constexpr std::int64_t kMaxCodeBlockBits = 8448;
}

SlotFormat slot_format(const ScenarioConfig& cfg, int slot) {
  assert(slot >= 0);
  const char c = cfg.tdd_pattern[slot % cfg.tdd_pattern.size()];
  SlotFormat fmt;
  switch (c) {
    case 'D':
      fmt.kind = SlotKind::Dl;
      fmt.data_symbols = 14 - cfg.pdcch_symbols;
      fmt.dl_end_symbol = 14;
      break;
    case 'S':
      fmt.kind = SlotKind::Special;
      fmt.data_symbols = cfg.special_slot_dl_symbols - cfg.pdcch_symbols;
      fmt.dl_end_symbol = cfg.special_slot_dl_symbols;
      break;
    default:
      fmt.kind = SlotKind::Ul;
      fmt.data_symbols = 0;
      fmt.dl_end_symbol = 0;
      break;
  }
  return fmt;
}

FeedbackTiming feedback_timing(const ScenarioConfig& cfg, int tx_slot) {
  const SlotFormat fmt = slot_format(cfg, tx_slot);
  assert(fmt.kind != SlotKind::Ul);
  const double decode_end =
      tx_slot * 14.0 + fmt.dl_end_symbol + cfg.ue_rx_proc_symbols;

  // first U slot with at least one symbol at or after decode completion
  int u = tx_slot + 1;
  while (slot_format(cfg, u).kind != SlotKind::Ul || decode_end > (u + 1) * 14.0 - 1.0) ++u;

  const double report_end = std::max(u * 14.0, decode_end) + 1.0;
  const double gnb_ready = report_end + cfg.gnb_tx_proc_symbols;

  FeedbackTiming t;
  t.ack_slot = u;
  t.ready_slot = static_cast<int>(std::ceil(gnb_ready / 14.0));
  return t;
}

int feedback_delay_slots(const ScenarioConfig& cfg, int tx_slot) {
  return feedback_timing(cfg, tx_slot).ready_slot - tx_slot;
}

std::vector<int> HarqProcess::failed_cbgs() const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(cbg_status.size()); ++i)
    if (cbg_status[i] == CbgStatus::Failed) out.push_back(i);
  return out;
}

std::int64_t HarqProcess::failed_bits() const {
  std::int64_t bits = 0;
  for (int i = 0; i < static_cast<int>(cbg_status.size()); ++i)
    if (cbg_status[i] == CbgStatus::Failed) bits += tb.cbg_bits[i];
  return bits;
}

bool HarqProcess::all_acked() const {
  return std::all_of(cbg_status.begin(), cbg_status.end(),
                     [](CbgStatus s) { return s == CbgStatus::Acked; });
}

CellMac::CellMac(const ScenarioConfig& cfg, std::vector<FlowType> ue_flows)
    : cfg_(&cfg), flows_(std::move(ue_flows)) {
  queues_.resize(flows_.size());
  for (std::size_t i = 0; i < flows_.size(); ++i) {
    if (flows_[i] == FlowType::Embb) queues_[i] = DlQueue::full_buffer();
    weights_.push_back(flows_[i] == FlowType::Xr ? cfg.scheduler.w_xr
                                                 : cfg.scheduler.w_embb);
  }
  credits_ = weights_;
}

SchedulingDecision CellMac::allocate(int slot, const SlotFormat& fmt, const McsTable& table,
                                     std::span<const int> mcs_by_ue) {
  SchedulingDecision dec;
  dec.slot = slot;
  const int n_rbg = cfg_->n_rbg();
  dec.free_rbgs_after = n_rbg;
  if (fmt.data_symbols <= 0) return dec;

  // rotate the walk origin per slot: frequency hopping decorrelates a
  // link's consecutive transmissions from one fading subband
  const int walk_start = slot % n_rbg;
  auto physical = [&](int logical) { return (walk_start + logical) % n_rbg; };
  int next_rbg = 0;  // logical walk position

  // ---- tier 1: pending HARQ retransmissions, round robin ----
  std::vector<int> eligible;
  for (const auto& [id, p] : processes_) {
    if (p.in_flight || p.next_eligible_slot > slot) continue;
    if (p.failed_cbgs().empty()) continue;
    assert(p.tx_count <= cfg_->harq.max_retx);
    eligible.push_back(id);
  }
  std::sort(eligible.begin(), eligible.end());
  const auto pivot = std::lower_bound(eligible.begin(), eligible.end(), harq_rr_next_);
  std::rotate(eligible.begin(), pivot, eligible.end());

  for (int id : eligible) {
    HarqProcess& p = processes_.at(id);
    const McsEntry& mcs = table[p.tb.mcs_index];
    const std::int64_t need = p.failed_bits();

    // smallest run of RBGs from the walk pointer whose capacity carries
    // the failed CBGs; hypothetical full-size RBGs beyond the slot edge
    // quantify unfittable candidates for the audit trail
    int k = 0, prbs = 0;
    while (prbs == 0 || tb_size_bits(prbs, fmt.data_symbols, mcs) < need) {
      const int rbg = next_rbg + k;
      prbs += rbg < n_rbg ? cfg_->prbs_in_rbg(physical(rbg)) : cfg_->scheduler.rbg_size_prb;
      ++k;
    }
    if (next_rbg + k > n_rbg) {
      dec.deferred_retx.emplace_back(id, k);
      continue;  // does not fit; stays eligible
    }

    Grant g;
    g.ue_id = p.ue_id;
    g.process_id = id;
    for (int i = 0; i < k; ++i) g.rbgs.push_back(physical(next_rbg + i));
    g.n_prb = prbs;
    g.mcs_index = p.tb.mcs_index;
    g.is_retx = true;
    g.cbgs = p.failed_cbgs();
    g.tb_bits = need;
    g.tier = 1;
    dec.grants.push_back(std::move(g));

    p.tx_count++;
    p.in_flight = true;
    p.flight_cbgs = dec.grants.back().cbgs;
    p.flight_reveal_slot = -1;
    p.flight_outcome.clear();

    harq_rr_next_ = id + 1;
    next_rbg += k;
    if (next_rbg >= n_rbg) break;
  }

  // ---- tiers 2/3: interleaved WRR over the XR/eMBB backlog ----
  const int n_ues = static_cast<int>(queues_.size());
  std::vector<std::vector<int>> acc_rbgs(n_ues);
  std::vector<int> acc_prbs(n_ues, 0);

  auto capacity_bits = [&](int ue) -> std::int64_t {
    if (acc_prbs[ue] == 0) return 0;
    return tb_size_bits(acc_prbs[ue], fmt.data_symbols, table[mcs_by_ue[ue]]);
  };
  auto needy = [&](int ue) {
    return !queues_[ue].empty() && queues_[ue].backlog_bits() > capacity_bits(ue);
  };

  while (next_rbg < n_rbg && n_ues > 0) {
    bool any_needy = false, any_credit = false;
    for (int ue = 0; ue < n_ues; ++ue) {
      if (!needy(ue)) continue;
      any_needy = true;
      if (credits_[ue] > 0) any_credit = true;
    }
    if (!any_needy) break;
    if (!any_credit) credits_ = weights_;  // round complete: refresh

    while (!(needy(static_cast<int>(wrr_cursor_)) && credits_[wrr_cursor_] > 0))
      wrr_cursor_ = (wrr_cursor_ + 1) % n_ues;

    const int ue = static_cast<int>(wrr_cursor_);
    while (credits_[ue] > 0 && next_rbg < n_rbg && needy(ue)) {
      acc_rbgs[ue].push_back(physical(next_rbg));
      acc_prbs[ue] += cfg_->prbs_in_rbg(physical(next_rbg));
      ++next_rbg;
      --credits_[ue];
    }
    // stay on an interrupted visit so leftover credit resumes next slot
    if (!(next_rbg >= n_rbg && needy(ue) && credits_[ue] > 0))
      wrr_cursor_ = (wrr_cursor_ + 1) % n_ues;
  }

  for (int ue = 0; ue < n_ues; ++ue) {
    if (acc_rbgs[ue].empty()) continue;
    const McsEntry& mcs = table[mcs_by_ue[ue]];
    const std::int64_t tb_bits = tb_size_bits(acc_prbs[ue], fmt.data_symbols, mcs);
    const std::int64_t payload =
        queues_[ue].is_full_buffer() ? tb_bits
                                     : std::min(tb_bits, queues_[ue].backlog_bits());

    HarqProcess p;
    p.process_id = next_process_id_++;
    p.ue_id = ue;
    p.tb.segments = queues_[ue].dequeue_bits(payload);
    p.tb.tb_bits = tb_bits;
    p.tb.payload_bits = payload;
    p.tb.mcs_index = mcs.index;
    const int n_cbg = static_cast<int>(std::clamp<std::int64_t>(
        (tb_bits + kMaxCodeBlockBits - 1) / kMaxCodeBlockBits, 1, cfg_->harq.n_cbg_per_tb));
    p.tb.cbg_bits.resize(n_cbg);
    const std::int64_t base = tb_bits / n_cbg, rem = tb_bits % n_cbg;
    for (int i = 0; i < n_cbg; ++i) p.tb.cbg_bits[i] = base + (i < rem ? 1 : 0);
    p.cbg_status.assign(n_cbg, CbgStatus::Pending);
    p.cbg_sinr_lin.assign(n_cbg, 0.0);
    p.tx_count = 1;
    p.in_flight = true;
    p.flight_cbgs.resize(n_cbg);
    for (int i = 0; i < n_cbg; ++i) p.flight_cbgs[i] = i;

    Grant g;
    g.ue_id = ue;
    g.process_id = p.process_id;
    g.rbgs = acc_rbgs[ue];
    g.n_prb = acc_prbs[ue];
    g.mcs_index = mcs.index;
    g.is_retx = false;
    g.cbgs = p.flight_cbgs;
    g.tb_bits = tb_bits;
    g.tier = flows_[ue] == FlowType::Xr ? 2 : 3;
    dec.grants.push_back(std::move(g));
    processes_.emplace(p.process_id, std::move(p));
  }

  dec.free_rbgs_after = n_rbg - next_rbg;
  return dec;
}

void CellMac::on_transmission_evaluated(int process_id, double eff_sinr_db,
                                        std::vector<bool> cbg_ok, int reveal_slot) {
  HarqProcess& p = processes_.at(process_id);
  assert(p.in_flight);
  if (cbg_ok.size() != p.flight_cbgs.size())
    throw MacError("harq: outcome arity does not match the transmitted CBG set");
  const double lin = std::pow(10.0, eff_sinr_db / 10.0);
  for (int cbg : p.flight_cbgs) p.cbg_sinr_lin[cbg] += lin;
  p.flight_outcome = std::move(cbg_ok);
  p.flight_reveal_slot = reveal_slot;
}

FeedbackResult CellMac::process_feedback(int process_id, const std::vector<bool>& cbg_ok,
                                         int slot) {
  HarqProcess& p = processes_.at(process_id);
  if (cbg_ok.size() != p.flight_cbgs.size())
    throw MacError("harq: outcome arity does not match the transmitted CBG set");

  FeedbackResult res;
  res.was_first_tx = (p.tx_count == 1);
  for (std::size_t i = 0; i < cbg_ok.size(); ++i)
    p.cbg_status[p.flight_cbgs[i]] = cbg_ok[i] ? CbgStatus::Acked : CbgStatus::Failed;
  p.in_flight = false;
  p.flight_reveal_slot = -1;

  if (p.all_acked()) {
    res.closed = true;
  } else if (p.tx_count <= cfg_->harq.max_retx) {
    res.retx_pending = true;
    p.next_eligible_slot = slot;
  } else {
    res.discarded = true;
  }
  return res;
}

std::vector<int> CellMac::due_feedback(int slot) const {
  std::vector<int> out;
  for (const auto& [id, p] : processes_)
    if (p.in_flight && p.flight_reveal_slot == slot) out.push_back(id);
  return out;
}

}  // namespace xrsim
