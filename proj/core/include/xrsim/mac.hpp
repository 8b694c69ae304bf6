// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "xrsim/config.hpp"
#include "xrsim/deployment.hpp"
#include "xrsim/phy.hpp"
#include "xrsim/traffic.hpp"

namespace xrsim {

enum class SlotKind : std::uint8_t { Dl, Special, Ul };

struct SlotFormat {
  SlotKind kind = SlotKind::Dl;
  int data_symbols = 0;     // schedulable DL data symbols after PDCCH
  int dl_end_symbol = 0;    // last DL symbol position within the slot
};

SlotFormat slot_format(const ScenarioConfig& cfg, int slot);

// Feedback path over the TDD pattern: UE decodes (ue_rx_proc symbols past
// the DL portion), the report rides the first U slot with room, the gNB
// needs gnb_tx_proc symbols before it can act.
struct FeedbackTiming {
  int ack_slot = -1;    // U slot carrying the ACK / CQI report
  int ready_slot = -1;  // first slot the gNB can act on it
};
FeedbackTiming feedback_timing(const ScenarioConfig& cfg, int tx_slot);
int feedback_delay_slots(const ScenarioConfig& cfg, int tx_slot);

enum class CbgStatus : std::uint8_t { Pending, Acked, Failed };

struct TbDescriptor {
  std::vector<Segment> segments;          // payload map, in TB order
  std::int64_t tb_bits = 0;               // TB capacity (payload may be smaller)
  std::int64_t payload_bits = 0;
  int mcs_index = 0;
  std::vector<std::int64_t> cbg_bits;     // near-equal split of tb_bits
};

struct HarqProcess {
  int process_id = -1;
  int ue_id = -1;                         // local (per-cell) UE index
  TbDescriptor tb;
  std::vector<CbgStatus> cbg_status;
  std::vector<double> cbg_sinr_lin;       // Chase-accumulated linear SINR per CBG
  int tx_count = 0;                       // 1 initial + up to max_retx
  int next_eligible_slot = 0;
  bool in_flight = false;                 // transmitted, feedback not yet revealed
  std::vector<int> flight_cbgs;           // CBGs covered by the in-flight transmission
  int flight_reveal_slot = -1;
  std::vector<bool> flight_outcome;       // decoded per flight CBG (set at evaluation)

  std::vector<int> failed_cbgs() const;
  std::int64_t failed_bits() const;
  bool all_acked() const;
};

struct Grant {
  int ue_id = -1;                         // local UE index
  int process_id = -1;
  std::vector<int> rbgs;                  // walk order (hops per slot)
  int n_prb = 0;
  int mcs_index = 0;
  bool is_retx = false;
  std::vector<int> cbgs;                  // transmitted CBG ids
  std::int64_t tb_bits = 0;               // capacity of this transmission
  int tier = 0;                           // 1 retx, 2 XR, 3 eMBB (audit)
};

struct SchedulingDecision {
  int slot = -1;
  std::vector<Grant> grants;
  int free_rbgs_after = 0;
  // tier-1 candidates left unserved because they no longer fit (audit)
  std::vector<std::pair<int, int>> deferred_retx;  // (process_id, rbgs_needed)
};

struct FeedbackResult {
  bool closed = false;        // all CBGs acked
  bool discarded = false;     // HARQ exhausted with failures
  bool retx_pending = false;
  bool was_first_tx = false;  // outcome of an initial transmission (OLLA input)
};

class MacError : public std::runtime_error {
 public:
  explicit MacError(const std::string& what) : std::runtime_error(what) {}
};

// Per-cell scheduler: strict priority (HARQ retx > first transmissions)
// with credit-based interleaved WRR across the XR/eMBB backlog.
class CellMac {
 public:
  CellMac(const ScenarioConfig& cfg, std::vector<FlowType> ue_flows);

  DlQueue& queue(int local_ue) { return queues_[local_ue]; }
  const DlQueue& queue(int local_ue) const { return queues_[local_ue]; }
  int n_ues() const { return static_cast<int>(queues_.size()); }

  // One scheduling pass. mcs_by_ue holds each UE's current link adaptation
  // pick; retransmissions keep their original MCS.
  SchedulingDecision allocate(int slot, const SlotFormat& fmt, const McsTable& table,
                              std::span<const int> mcs_by_ue);

  // Transmission evaluated by the PHY: record outcome for later reveal.
  void on_transmission_evaluated(int process_id, double eff_sinr_db,
                                 std::vector<bool> cbg_ok, int reveal_slot);

  // Reveal one process's feedback (outcome arity must match the flight).
  FeedbackResult process_feedback(int process_id, const std::vector<bool>& cbg_ok, int slot);

  // All processes whose feedback becomes visible at `slot`.
  std::vector<int> due_feedback(int slot) const;

  const HarqProcess& process(int id) const { return processes_.at(id); }
  HarqProcess& process(int id) { return processes_.at(id); }
  void erase_process(int id) { processes_.erase(id); }
  const std::map<int, HarqProcess>& processes() const { return processes_; }

  const std::vector<int>& wrr_credits() const { return credits_; }

 private:
  std::int64_t remaining_need_bits(int ue, std::int64_t granted_capacity) const;
  int count_needed_rbgs(std::int64_t bits, int data_symbols, const McsEntry& mcs,
                        int first_free_rbg) const;

  const ScenarioConfig* cfg_;
  std::vector<FlowType> flows_;
  std::vector<DlQueue> queues_;
  std::vector<int> weights_;
  std::vector<int> credits_;
  std::size_t wrr_cursor_ = 0;
  int harq_rr_next_ = 0;
  int next_process_id_ = 0;
  std::map<int, HarqProcess> processes_;
};

}  // namespace xrsim
