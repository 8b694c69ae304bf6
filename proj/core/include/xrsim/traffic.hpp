// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <deque>
#include <vector>

#include "xrsim/config.hpp"
#include "xrsim/rng.hpp"

namespace xrsim {

// One application video frame of an XR flow.
struct XrFrame {
  int flow_id = 0;
  int seq = 0;
  double gen_time_ms = 0;      // k / fps * 1000
  double arrival_time_ms = 0;  // gen_time + jitter, at the gNB
  std::int64_t size_bits = 0;
  double deadline_ms = 0;      // arrival_time + PDB
};

// Byte range of one frame carried inside a transport block.
struct Segment {
  int frame_seq = -1;          // -1 marks anonymous full-buffer payload
  std::int64_t bits = 0;
};

// Downlink RLC-style queue for one UE: either a FIFO of XR frames with a
// head-of-line bit pointer, or a full-buffer source that never empties.
class DlQueue {
 public:
  DlQueue() = default;
  static DlQueue full_buffer();

  void push(const XrFrame& frame);
  bool empty() const { return !full_buffer_ && frames_.empty(); }
  bool is_full_buffer() const { return full_buffer_; }
  std::int64_t backlog_bits() const;

  // Removes up to n_bits in FIFO order, spanning frame boundaries.
  // A full-buffer queue always yields exactly n_bits of anonymous payload.
  std::vector<Segment> dequeue_bits(std::int64_t n_bits);

  // Drops a frame's still-queued bytes (HARQ gave up on it).
  void purge_frame(int seq);

 private:
  struct Pending {
    int seq;
    std::int64_t remaining_bits;
  };
  bool full_buffer_ = false;
  std::deque<Pending> frames_;
  std::int64_t backlog_ = 0;
};

double sample_trunc_gauss(const TruncGaussParams& params, const CounterRng& rng,
                          std::uint64_t key_a, std::uint64_t key_b = 0);

// Frames of one flow, ceil(horizon * fps / 1000) of them, generated on the
// frame grid phase_ms + k/fps and sorted by arrival time. Sizes are whole
// bytes; jittered arrivals never reorder (jitter span is below the frame
// period, asserted). The phase models unsynchronized stream starts across
// users; 0 keeps the plain grid.
std::vector<XrFrame> generate_frames(const XrFlowConfig& flow, double horizon_ms,
                                     const CounterRng& rng, int flow_id,
                                     double phase_ms = 0);

double offered_load_mbps(const XrFlowConfig& flow);

}  // namespace xrsim
