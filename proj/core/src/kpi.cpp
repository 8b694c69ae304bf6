// SPDX-License-Identifier: Apache-2.0
#include "xrsim/kpi.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace xrsim {

double frame_latency_ms(const FrameRecord& rec, bool from_generation) {
  if (!rec.delivered()) return std::numeric_limits<double>::infinity();
  return rec.completion_ms - (from_generation ? rec.gen_ms : rec.arrival_ms);
}

UeFrameOutcomes frame_outcomes(std::span<const FrameRecord> frames, double pdb_ms,
                               double sim_end_ms, bool from_generation) {
  UeFrameOutcomes out;
  for (const FrameRecord& f : frames) {
    const double start = from_generation ? f.gen_ms : f.arrival_ms;
    const double deadline = start + pdb_ms;
    const double latency = frame_latency_ms(f, from_generation);
    if (f.delivered()) {
      out.n_frames++;
      if (latency <= pdb_ms) out.n_on_time++;
      out.latency_ms.push_back(latency);
    } else if (f.undeliverable || deadline <= sim_end_ms) {
      // provably late within the horizon
      out.n_frames++;
      out.latency_ms.push_back(std::numeric_limits<double>::infinity());
    }
    // else: deadline beyond the horizon with no delivery yet -- undecidable
  }
  return out;
}

bool is_satisfied(const UeFrameOutcomes& outcomes) {
  assert(outcomes.n_frames >= 1);
  return static_cast<double>(outcomes.n_on_time) >= 0.99 * outcomes.n_frames;
}

CapacityResult xr_capacity(const std::map<int, double>& satisfied_fraction_by_n) {
  CapacityResult res;
  res.satisfied_fraction = satisfied_fraction_by_n;
  for (const auto& [n, frac] : satisfied_fraction_by_n)
    if (frac >= 0.90) res.capacity = std::max(res.capacity, n);
  return res;
}

double percentile(std::span<const double> samples, double p) {
  if (samples.empty()) throw std::invalid_argument("percentile: empty sample set");
  assert(p > 0 && p < 1);
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t rank =
      static_cast<std::size_t>(std::ceil(p * static_cast<double>(sorted.size())));
  return sorted[std::max<std::size_t>(rank, 1) - 1];
}

double prb_utilization(std::int64_t granted_prb_slots, std::int64_t available_prb_slots) {
  assert(available_prb_slots > 0);
  return static_cast<double>(granted_prb_slots) / static_cast<double>(available_prb_slots);
}

double embb_throughput_mbps(std::int64_t delivered_bits, double window_s) {
  assert(window_s > 0);
  return static_cast<double>(delivered_bits) / window_s / 1e6;
}

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / 1.4142135623730951); }

double normal_quantile(double p) {
  double lo = -10.0, hi = 10.0;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    (normal_cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double binomial_ci(int n, double p_hat, double confidence) {
  assert(n >= 1);
  assert(p_hat >= 0 && p_hat <= 1);
  const double z = normal_quantile(0.5 + confidence / 2.0);
  return z * std::sqrt(p_hat * (1.0 - p_hat) / n);
}

}  // namespace xrsim
