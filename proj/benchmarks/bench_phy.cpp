// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include <vector>

#include "xrsim/phy.hpp"

namespace {

void EffectiveSinr(benchmark::State& state) {
  std::vector<double> sinrs(state.range(0));
  for (std::size_t i = 0; i < sinrs.size(); ++i) sinrs[i] = -5.0 + static_cast<double>(i);
  for (auto _ : state) benchmark::DoNotOptimize(xrsim::effective_sinr_db(sinrs));
}
BENCHMARK(EffectiveSinr)->Arg(2)->Arg(17);

void BlepCurve(benchmark::State& state) {
  const xrsim::McsTable table = xrsim::make_mcs_table(2.0);
  double g = -10;
  for (auto _ : state) {
    benchmark::DoNotOptimize(xrsim::blep(g, table[20], 2.0));
    g = g > 30 ? -10 : g + 0.1;
  }
}
BENCHMARK(BlepCurve);

}  // namespace
