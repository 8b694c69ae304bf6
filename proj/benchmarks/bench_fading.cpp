// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "xrsim/deployment.hpp"

namespace {

void FadingAdvance(benchmark::State& state) {
  xrsim::ScenarioConfig cfg = xrsim::default_scenario();
  const int n_ues = static_cast<int>(state.range(0));
  xrsim::FadingField field(cfg, cfg.layout.n_cells, n_ues, 1);
  int slot = 0;
  for (auto _ : state) {
    field.advance_to(slot++);
    benchmark::DoNotOptimize(field.gain_db(0, 0, 0));
  }
  state.SetItemsProcessed(state.iterations() * cfg.layout.n_cells * n_ues * cfg.n_rbg());
}
BENCHMARK(FadingAdvance)->Arg(24)->Arg(72)->Arg(156);

void SinrFullInterference(benchmark::State& state) {
  xrsim::ScenarioConfig cfg = xrsim::default_scenario();
  const xrsim::Deployment dep = xrsim::generate_layout(cfg, 1);
  const xrsim::RadioContext radio = xrsim::make_radio_context(cfg);
  xrsim::FadingField field(cfg, dep.n_cells(), dep.n_ues(), 1);
  field.advance_to(0);
  xrsim::ActivityMap act(dep.n_cells(), cfg.n_rbg());
  for (int c = 0; c < dep.n_cells(); ++c)
    for (int r = 0; r < cfg.n_rbg(); ++r) act.set(c, r);
  int ue = 0, rbg = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(xrsim::sinr_db(radio, dep, field, act, ue, rbg));
    ue = (ue + 1) % dep.n_ues();
    rbg = (rbg + 1) % cfg.n_rbg();
  }
}
BENCHMARK(SinrFullInterference);

}  // namespace
