// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <vector>

#include "doctest.h"
#include "xrsim/kpi.hpp"
#include "xrsim/rng.hpp"

using namespace xrsim;

namespace {

FrameRecord rec(double arrival, double completion) {
  FrameRecord f;
  f.arrival_ms = arrival;
  f.gen_ms = arrival;
  if (completion >= 0) f.completion_ms = completion;
  return f;
}

UeFrameOutcomes outcomes_of(int n, int on_time) {
  UeFrameOutcomes oc;
  oc.n_frames = n;
  oc.n_on_time = on_time;
  return oc;
}

}  // namespace

TEST_SUITE_BEGIN("kpi");

TEST_CASE("frame latency") {
  CHECK(frame_latency_ms(rec(10, 18)) == 8);
  CHECK(std::isinf(frame_latency_ms(rec(10, -1))));
  FrameRecord gen_clock = rec(12, 20);
  gen_clock.gen_ms = 10;
  CHECK(frame_latency_ms(gen_clock, true) == 10);
  CHECK(frame_latency_ms(gen_clock, false) == 8);
}

TEST_CASE("deadline boundary is closed") {
  std::vector<FrameRecord> frames{rec(0, 10)};  // latency exactly == PDB
  const auto oc = frame_outcomes(frames, 10, 1000);
  CHECK(oc.n_frames == 1);
  CHECK(oc.n_on_time == 1);
}

TEST_CASE("undelivered frames count late once decidable") {
  std::vector<FrameRecord> frames{rec(0, -1), rec(995, -1)};
  const auto oc = frame_outcomes(frames, 10, 1000);
  // second frame's deadline (1005) exceeds the horizon: undecidable
  CHECK(oc.n_frames == 1);
  CHECK(oc.n_on_time == 0);
  REQUIRE(oc.latency_ms.size() == 1);
  CHECK(std::isinf(oc.latency_ms[0]));

  FrameRecord killed = rec(995, -1);
  killed.undeliverable = true;  // HARQ gave up: decided late immediately
  const auto oc2 = frame_outcomes(std::vector<FrameRecord>{killed}, 10, 1000);
  CHECK(oc2.n_frames == 1);
  CHECK(oc2.n_on_time == 0);
}

TEST_CASE("satisfaction threshold at 99 percent") {
  CHECK(is_satisfied(outcomes_of(360, 357)));   // 0.9917
  CHECK(!is_satisfied(outcomes_of(360, 356)));  // 0.9889
  CHECK(is_satisfied(outcomes_of(100, 100)));
  CHECK(is_satisfied(outcomes_of(100, 99)));
}

TEST_CASE("relaxing the PDB never breaks satisfaction") {
  const CounterRng rng(4, RngStream::Errors);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<FrameRecord> frames;
    for (int k = 0; k < 200; ++k) {
      const double arrival = k * 16.0;
      const bool delivered = rng.uniform(trial, k, 0) < 0.95;
      frames.push_back(
          rec(arrival, delivered ? arrival + 30 * rng.uniform(trial, k, 1) : -1));
    }
    const double sim_end = 4000;
    double prev_ratio = -1;
    for (double pdb : {5.0, 10.0, 15.0, 20.0, 30.0}) {
      const auto oc = frame_outcomes(frames, pdb, sim_end);
      const double ratio = static_cast<double>(oc.n_on_time) / oc.n_frames;
      CHECK(ratio >= prev_ratio - 1e-12);
      prev_ratio = ratio;
    }
  }
}

TEST_CASE("capacity definition") {
  CHECK(xr_capacity({{1, 1.0}, {2, 0.95}, {3, 0.85}}).capacity == 2);
  CHECK(xr_capacity({{1, 1.0}, {2, 0.90}, {3, 0.85}}).capacity == 2);  // exact 90% counts
  CHECK(xr_capacity({{1, 0.89}, {2, 0.5}}).capacity == 0);
  CHECK(xr_capacity({{3, 0.93}, {4, 0.91}, {5, 0.78}}).capacity == 4);
  // 270 of 300 calls is exactly the 90% bar
  CHECK(xr_capacity({{5, 270.0 / 300.0}}).capacity == 5);
}

TEST_CASE("nearest-rank percentile") {
  std::vector<double> v(100);
  for (int i = 0; i < 100; ++i) v[i] = i + 1;
  CHECK(percentile(v, 0.99) == 99);
  CHECK(percentile(v, 0.5) == 50);
  const std::vector<double> one{42.0};
  CHECK(percentile(one, 0.01) == 42);
  CHECK(percentile(one, 0.99) == 42);
  const std::vector<double> three{5, 1, 3};
  CHECK(percentile(three, 0.5) == 3);  // ceil(1.5) = 2nd of {1,3,5}
  CHECK_THROWS_AS(percentile(std::vector<double>{}, 0.5), std::invalid_argument);

  SUBCASE("non-decreasing in p") {
    const CounterRng rng(8, RngStream::Errors);
    std::vector<double> samples;
    for (int i = 0; i < 500; ++i) samples.push_back(rng.uniform(i));
    double prev = -1;
    for (double p = 0.01; p < 1.0; p += 0.01) {
      const double q = percentile(samples, p);
      CHECK(q >= prev);
      prev = q;
    }
  }
}

TEST_CASE("prb utilization") {
  CHECK(prb_utilization(100, 100) == 1.0);
  CHECK(prb_utilization(0, 100) == 0.0);
  CHECK(prb_utilization(50, 100) == 0.5);
}

TEST_CASE("embb throughput") {
  CHECK(embb_throughput_mbps(279000000, 1.0) == doctest::Approx(279.0));
  CHECK(embb_throughput_mbps(0, 5.0) == 0.0);
  // additivity over UEs
  CHECK(embb_throughput_mbps(100e6, 2.0) + embb_throughput_mbps(60e6, 2.0) ==
        doctest::Approx(embb_throughput_mbps(160e6, 2.0)));
}

TEST_CASE("binomial confidence margin") {
  // z(99%) = 2.5758, sqrt(0.99*0.01/360) = 0.0052440
  CHECK(binomial_ci(360, 0.99, 0.99) == doctest::Approx(0.013508).epsilon(0.008));
  CHECK(binomial_ci(360, 0.0, 0.99) == 0.0);
  CHECK(binomial_ci(360, 1.0, 0.99) == 0.0);
  // quadrupling n halves the margin
  CHECK(binomial_ci(400, 0.8, 0.95) ==
        doctest::Approx(2.0 * binomial_ci(1600, 0.8, 0.95)).epsilon(1e-9));
}

TEST_SUITE_END();
