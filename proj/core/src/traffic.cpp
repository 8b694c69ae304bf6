// SPDX-License-Identifier: Apache-2.0
#include "xrsim/traffic.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

namespace xrsim {

DlQueue DlQueue::full_buffer() {
  DlQueue q;
  q.full_buffer_ = true;
  return q;
}

void DlQueue::push(const XrFrame& frame) {
  assert(!full_buffer_);
  frames_.push_back({frame.seq, frame.size_bits});
  backlog_ += frame.size_bits;
}

std::int64_t DlQueue::backlog_bits() const {
  return full_buffer_ ? std::numeric_limits<std::int64_t>::max() : backlog_;
}

std::vector<Segment> DlQueue::dequeue_bits(std::int64_t n_bits) {
  std::vector<Segment> out;
  if (n_bits <= 0) return out;
  if (full_buffer_) {
    out.push_back({-1, n_bits});
    return out;
  }
  while (n_bits > 0 && !frames_.empty()) {
    Pending& head = frames_.front();
    const std::int64_t take = std::min(n_bits, head.remaining_bits);
    out.push_back({head.seq, take});
    head.remaining_bits -= take;
    backlog_ -= take;
    n_bits -= take;
    if (head.remaining_bits == 0) frames_.pop_front();
  }
  return out;
}

void DlQueue::purge_frame(int seq) {
  for (auto it = frames_.begin(); it != frames_.end(); ++it) {
    if (it->seq != seq) continue;
    backlog_ -= it->remaining_bits;
    frames_.erase(it);
    return;
  }
}

double sample_trunc_gauss(const TruncGaussParams& params, const CounterRng& rng,
                          std::uint64_t key_a, std::uint64_t key_b) {
  // Rejection off the parent Gaussian; bounds in this model sit within a
  // few sigma, so a handful of attempts suffices.
  for (std::uint64_t attempt = 0; attempt < 1000; ++attempt) {
    const double draw = params.mean + params.std * rng.gaussian(key_a, key_b, attempt);
    if (draw >= params.min && draw <= params.max) return draw;
  }
  return std::clamp(params.mean, params.min, params.max);
}

std::vector<XrFrame> generate_frames(const XrFlowConfig& flow, double horizon_ms,
                                     const CounterRng& rng, int flow_id,
                                     double phase_ms) {
  std::vector<XrFrame> frames;
  if (horizon_ms <= 0) return frames;
  const double period_ms = 1000.0 / flow.fps;
  const int n_frames = static_cast<int>(std::ceil(horizon_ms * flow.fps / 1000.0));
  frames.reserve(n_frames);
  const std::uint64_t fid = static_cast<std::uint64_t>(flow_id);
  for (int k = 0; k < n_frames; ++k) {
    const double gen = phase_ms + k * period_ms;
    if (phase_ms == 0 && gen >= horizon_ms) break;
    XrFrame f;
    f.flow_id = flow_id;
    f.seq = k;
    f.gen_time_ms = gen;
    const double jitter =
        sample_trunc_gauss(flow.jitter_ms, rng, fid, (static_cast<std::uint64_t>(k) << 1));
    f.arrival_time_ms = gen + jitter;
    const double kb =
        sample_trunc_gauss(flow.frame_size_kb, rng, fid, (static_cast<std::uint64_t>(k) << 1) | 1);
    f.size_bits = static_cast<std::int64_t>(std::llround(kb * 1000.0)) * 8;  // whole bytes
    f.deadline_ms = f.arrival_time_ms + flow.pdb_ms;
    frames.push_back(f);
  }
  // jitter span < frame period keeps arrivals ordered
  for (std::size_t i = 1; i < frames.size(); ++i)
    assert(frames[i].arrival_time_ms >= frames[i - 1].arrival_time_ms);
  return frames;
}

double offered_load_mbps(const XrFlowConfig& flow) {
  return flow.frame_size_kb.mean * 8.0 * flow.fps / 1000.0;
}

}  // namespace xrsim
