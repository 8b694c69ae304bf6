// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "xrsim/engine.hpp"

namespace {

// whole-run cost at the reference load (12 cells, N XR + 1 eMBB per cell)
void EngineRun(benchmark::State& state) {
  xrsim::ScenarioConfig cfg = xrsim::default_scenario();
  cfg.sim_duration_s = 0.25;  // 500 slots per iteration
  cfg.warmup_slots = 0;
  cfg.n_xr_ue_per_cell = static_cast<int>(state.range(0));
  cfg.n_embb_ue_per_cell = 1;
  std::uint64_t seed = 1;
  for (auto _ : state) {
    const xrsim::RunResult r = xrsim::run(cfg, seed++);
    benchmark::DoNotOptimize(r.frames.size());
  }
  state.SetItemsProcessed(state.iterations() * cfg.total_slots());
}
BENCHMARK(EngineRun)->Arg(1)->Arg(5)->Unit(benchmark::kMillisecond);

}  // namespace
