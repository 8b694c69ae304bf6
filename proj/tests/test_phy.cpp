// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <vector>

#include "doctest.h"
#include "xrsim/phy.hpp"
#include "xrsim/rng.hpp"

using namespace xrsim;

namespace {
const McsTable kTable = make_mcs_table(2.0);
}

TEST_SUITE_BEGIN("phy");

TEST_CASE("mcs table shape") {
  CHECK(kTable.front().se_bits_per_re == doctest::Approx(0.2344).epsilon(1e-3));
  CHECK(kTable.back().se_bits_per_re == doctest::Approx(7.4063).epsilon(1e-4));
  CHECK(kTable.front().modulation_order == 2);
  CHECK(kTable.back().modulation_order == 8);
  for (int i = 1; i < kNumMcs; ++i) {
    CHECK(kTable[i].se_bits_per_re > kTable[i - 1].se_bits_per_re);
    CHECK(kTable[i].snr_10pct_db > kTable[i - 1].snr_10pct_db);
    CHECK((kTable[i].modulation_order == 2 || kTable[i].modulation_order == 4 ||
           kTable[i].modulation_order == 6 || kTable[i].modulation_order == 8));
  }
}

TEST_CASE("effective SINR mapping") {
  SUBCASE("constant input is a fixed point") {
    for (double g : {-7.0, 0.0, 3.3, 21.0}) {
      const std::vector<double> v{g, g, g, g};
      CHECK(effective_sinr_db(v) == doctest::Approx(g).epsilon(1e-12));
    }
  }
  SUBCASE("{0,0} dB -> 0 dB") {
    const std::vector<double> v{0.0, 0.0};
    CHECK(effective_sinr_db(v) == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("{10,-10} dB -> 3.94 dB (closed-form oracle)") {
    const std::vector<double> v{10.0, -10.0};
    CHECK(effective_sinr_db(v) == doctest::Approx(3.9419).epsilon(2e-3));
  }
  SUBCASE("result lies between min and max of the inputs") {
    const CounterRng rng(1, RngStream::Errors);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<double> v;
      double lo = 1e9, hi = -1e9;
      for (int i = 0; i < 1 + trial % 7; ++i) {
        v.push_back(-15 + 40 * rng.uniform(trial, i));
        lo = std::min(lo, v.back());
        hi = std::max(hi, v.back());
      }
      const double eff = effective_sinr_db(v);
      CHECK(eff >= lo - 1e-9);
      CHECK(eff <= hi + 1e-9);
    }
  }
}

TEST_CASE("cqi quantization floors to 1 dB") {
  CHECK(make_cqi(0, 0, 7.4, 5).wideband_sinr_db == 7.0);
  CHECK(make_cqi(0, 0, -3.2, 5).wideband_sinr_db == -4.0);
  const CqiReport r = make_cqi(3, 8, 12.9, 15);
  CHECK(r.ue_id == 3);
  CHECK(r.slot_measured == 8);
  CHECK(r.slot_available == 15);
  CHECK(r.slot_available > r.slot_measured);
}

TEST_CASE("mcs selection clamps and respects the offset") {
  OllaState olla;
  olla.offset_db = 0;
  CHECK(select_mcs_db(-30, olla, kTable).index == 0);
  CHECK(select_mcs_db(40, olla, kTable).index == 27);

  // one dB short of MCS k, pushed over by a +1 dB offset
  const McsEntry& k = kTable[13];
  olla.offset_db = 1.0;
  CHECK(select_mcs_db(k.snr_10pct_db - 1.0, olla, kTable).index == 13);
  olla.offset_db = 0.999;
  CHECK(select_mcs_db(k.snr_10pct_db - 1.0, olla, kTable).index == 12);

  SUBCASE("monotone in reported SINR") {
    olla.offset_db = 0.7;
    int prev = 0;
    for (double g = -20; g <= 35; g += 0.25) {
      const int idx = select_mcs_db(g, olla, kTable).index;
      CHECK(idx >= prev);
      prev = idx;
    }
  }
}

TEST_CASE("olla stepping") {
  OllaState olla = make_olla(OllaConfig{}, HarqConfig{});
  CHECK(olla.step_down_db == doctest::Approx(0.1));
  CHECK(olla.step_up_db == doctest::Approx(0.3));  // (1-2/8)/(2/8)

  SUBCASE("eight passes move up by 0.8 dB") {
    olla_update(olla, std::vector<bool>(8, true));
    CHECK(olla.offset_db == doctest::Approx(0.8));
  }
  SUBCASE("2-of-8 failures is the equilibrium") {
    std::vector<bool> mixed(8, true);
    mixed[0] = mixed[1] = false;
    olla_update(olla, mixed);
    CHECK(olla.offset_db == doctest::Approx(0.0));
  }
  SUBCASE("offset clamps") {
    olla.offset_db = 10.0;
    olla_update(olla, std::vector<bool>(8, true));
    CHECK(olla.offset_db == 10.0);
    olla.offset_db = -10.0;
    olla_update(olla, std::vector<bool>(8, false));
    CHECK(olla.offset_db == -10.0);
  }
}

TEST_CASE("blep anchors, limits, monotonicity") {
  for (const McsEntry& m : kTable) {
    CHECK(blep(m.snr_10pct_db, m, 2.0) == doctest::Approx(0.10).epsilon(1e-9));
    CHECK(blep(1000, m, 2.0) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(blep(-1000, m, 2.0) == doctest::Approx(1.0).epsilon(1e-9));
    double prev = 1.0;
    for (double g = m.snr_10pct_db - 15; g < m.snr_10pct_db + 15; g += 0.1) {
      const double p = blep(g, m, 2.0);
      CHECK(p < prev);
      prev = p;
    }
  }
}

TEST_CASE("chase combining sums linear SINR") {
  const std::vector<double> twice{0.0, 0.0};
  CHECK(combine_chase_db(twice) == doctest::Approx(3.0103).epsilon(1e-4));
  const std::vector<double> single{-3.7};
  CHECK(combine_chase_db(single) == doctest::Approx(-3.7).epsilon(1e-12));
  const std::vector<double> triple{10.0, 10.0, 10.0};
  CHECK(combine_chase_db(triple) == doctest::Approx(14.7712).epsilon(1e-4));

  SUBCASE("never decreases the best attempt") {
    const CounterRng rng(2, RngStream::Errors);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> v;
      double best = -1e9;
      for (int i = 0; i < 1 + trial % 4; ++i) {
        v.push_back(-10 + 30 * rng.uniform(trial, i));
        best = std::max(best, v.back());
      }
      CHECK(combine_chase_db(v) >= best - 1e-9);
    }
  }
}

TEST_CASE("tb sizing") {
  CHECK(tb_size_bits(16, 13, kTable[27]) == 18486);
  McsEntry zero{};
  zero.se_bits_per_re = 0;
  CHECK(tb_size_bits(5, 13, zero) == 0);
  CHECK(tb_size_bits(1, 1, kTable[0]) == static_cast<std::int64_t>(12 * 0.234375));
}

TEST_CASE("olla fixed point under a stationary channel") {
  // constant true SINR; MCS from quantized CQI + offset; first-transmission
  // CBG failures drawn from the anchored logistic
  const double true_sinr_db = 10.0;
  OllaState olla = make_olla(OllaConfig{}, HarqConfig{});
  const CounterRng rng(33, RngStream::Errors);
  int fails = 0, total = 0;
  const int n_tbs = 4000;  // 32000 CBGs
  for (int tb = 0; tb < n_tbs; ++tb) {
    const McsEntry& mcs =
        select_mcs(make_cqi(0, 0, true_sinr_db, 1), olla, kTable);
    const double p_err = blep(true_sinr_db, mcs, 2.0);
    std::vector<bool> ok(8);
    for (int c = 0; c < 8; ++c) {
      ok[c] = rng.uniform(tb, c) >= p_err;
      if (!ok[c]) ++fails;
      ++total;
    }
    olla_update(olla, ok);
  }
  const double fraction = static_cast<double>(fails) / total;
  CHECK(fraction >= 0.20);
  CHECK(fraction <= 0.30);
}

TEST_SUITE_END();
