// SPDX-License-Identifier: Apache-2.0
#include "xrsim/deployment.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace xrsim {

double path_gain_db(double distance_3d_m, double carrier_ghz, double shadowing_db,
                    double beamforming_gain_db) {
  assert(distance_3d_m >= 1.0);
  const double pl =
      32.4 + 17.3 * std::log10(distance_3d_m) + 20.0 * std::log10(carrier_ghz);
  return -pl - shadowing_db + beamforming_gain_db;
}

namespace {

double dist3(const Position& a, const Position& b) {
  const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

}  // namespace

Deployment generate_layout(const ScenarioConfig& cfg, std::uint64_t seed) {
  Deployment dep;
  const int n_cells = cfg.layout.n_cells;
  const int cols = n_cells / 2;

  // 2 rows x cols grid, ISD spacing, centered in the hall
  const double x0 = cfg.layout.hall_x_m / 2.0 - (cols - 1) * cfg.layout.isd_m / 2.0;
  const double y0 = cfg.layout.hall_y_m / 2.0 - cfg.layout.isd_m / 2.0;
  for (int row = 0; row < 2; ++row)
    for (int col = 0; col < cols; ++col)
      dep.cells.push_back({x0 + col * cfg.layout.isd_m, y0 + row * cfg.layout.isd_m,
                           cfg.layout.gnb_height_m});

  const CounterRng drop_rng(seed, RngStream::Drops);
  const CounterRng shadow_rng(seed, RngStream::Shadowing);

  const int quota_xr = cfg.n_xr_ue_per_cell;
  const int quota_embb = cfg.n_embb_ue_per_cell;
  std::vector<int> count_xr(n_cells, 0), count_embb(n_cells, 0);

  // Draws are keyed by (flow, flow-local index, attempt) so one traffic
  // type's population is unchanged by the other's presence.
  auto drop_one = [&](FlowType flow, int flow_idx) {
    const int quota = flow == FlowType::Xr ? quota_xr : quota_embb;
    std::vector<int>& count = flow == FlowType::Xr ? count_xr : count_embb;
    const std::uint64_t fkey =
        (static_cast<std::uint64_t>(flow == FlowType::Embb) << 32) | flow_idx;
    for (int attempt = 0; attempt < cfg.layout.drop_max_attempts; ++attempt) {
      Position pos{drop_rng.uniform(fkey, attempt, 0) * cfg.layout.hall_x_m,
                   drop_rng.uniform(fkey, attempt, 1) * cfg.layout.hall_y_m,
                   cfg.layout.ue_height_m};
      std::vector<double> gains(n_cells);
      int best = 0;
      for (int c = 0; c < n_cells; ++c) {
        const double d = std::max(1.0, dist3(dep.cells[c], pos));
        const double shadow =
            shadow_rng.gaussian(fkey, attempt, c) * cfg.calibration.shadowing_std_db;
        gains[c] = path_gain_db(d, cfg.carrier_ghz, shadow, 0.0);
        if (gains[c] > gains[best]) best = c;
      }
      if (count[best] >= quota) continue;  // cell full: redrop
      count[best]++;
      UeInfo ue;
      ue.ue_id = static_cast<int>(dep.ues.size());
      ue.serving_cell = best;
      ue.flow = flow;
      ue.pos = pos;
      ue.stable_id = fkey;
      dep.ues.push_back(ue);
      for (int c = 0; c < n_cells; ++c) dep.link_gain_db[c].push_back(gains[c]);
      return;
    }
    throw DeploymentError("layout: equal-count drop did not converge; quota infeasible");
  };

  dep.link_gain_db.resize(n_cells);
  for (int i = 0; i < n_cells * quota_xr; ++i) drop_one(FlowType::Xr, i);
  for (int i = 0; i < n_cells * quota_embb; ++i) drop_one(FlowType::Embb, i);
  return dep;
}

double fading_rho_per_slot(double ue_speed_kmh, double carrier_ghz, double slot_ms) {
  if (ue_speed_kmh <= 0) return 1.0;
  const double speed_ms = ue_speed_kmh / 3.6;
  const double doppler_hz = speed_ms * carrier_ghz * 1e9 / 299792458.0;
  const double coherence_ms = 423.0 / doppler_hz;  // 0.423 / fd
  return std::exp(-slot_ms / coherence_ms);
}

void FadingField::init(const ScenarioConfig& cfg, int n_cells, int n_ues,
                       const std::vector<std::uint64_t>& ue_keys, std::uint64_t seed) {
  n_ues_ = n_ues;
  n_rbg_ = cfg.n_rbg();
  rng_ = CounterRng(seed, RngStream::Fading);
  state_.assign(static_cast<std::size_t>(n_cells) * n_ues * n_rbg_, 0.f);
  keys_.resize(state_.size());
  for (int c = 0; c < n_cells; ++c)
    for (int u = 0; u < n_ues; ++u)
      for (int r = 0; r < n_rbg_; ++r)
        keys_[(static_cast<std::size_t>(c) * n_ues + u) * n_rbg_ + r] =
            (ue_keys[u] << 20) | (static_cast<std::uint64_t>(c) << 10) | r;
  std_db_ = cfg.calibration.fading_std_db;
  disabled_ = std_db_ <= 0 || n_ues == 0;
  rho_ = fading_rho_per_slot(cfg.ue_speed_kmh, cfg.carrier_ghz, cfg.slot_ms());
  innov_scale_ = std::sqrt(std::max(0.0, 1.0 - rho_ * rho_)) * std_db_;
}

FadingField::FadingField(const ScenarioConfig& cfg, const Deployment& dep,
                         std::uint64_t seed) {
  std::vector<std::uint64_t> keys;
  for (const UeInfo& ue : dep.ues) keys.push_back(ue.stable_id);
  init(cfg, dep.n_cells(), dep.n_ues(), keys, seed);
}

FadingField::FadingField(const ScenarioConfig& cfg, int n_cells, int n_ues,
                         std::uint64_t seed) {
  std::vector<std::uint64_t> keys(n_ues);
  for (int u = 0; u < n_ues; ++u) keys[u] = u;
  init(cfg, n_cells, n_ues, keys, seed);
}

void FadingField::advance_to(int slot) {
  if (disabled_) return;
  while (current_slot_ < slot) {
    ++current_slot_;
    const std::uint64_t t = static_cast<std::uint64_t>(current_slot_);
    if (current_slot_ == 0) {
      for (std::size_t i = 0; i < state_.size(); ++i)
        state_[i] =
            static_cast<float>(std_db_ * FastGaussian::from_raw(rng_.raw(keys_[i], t)));
    } else {
      for (std::size_t i = 0; i < state_.size(); ++i)
        state_[i] = static_cast<float>(
            rho_ * state_[i] + innov_scale_ * FastGaussian::from_raw(rng_.raw(keys_[i], t)));
    }
  }
}

RadioContext make_radio_context(const ScenarioConfig& cfg) {
  RadioContext r;
  r.tx_power_per_prb_mw = std::pow(10.0, cfg.tx_power_dbm / 10.0) / cfg.n_prb;
  const double prb_hz = 12.0 * cfg.scs_khz * 1000.0;
  const double noise_dbm =
      -174.0 + 10.0 * std::log10(prb_hz) + cfg.calibration.noise_figure_db;
  r.noise_per_prb_mw = std::pow(10.0, noise_dbm / 10.0);
  r.bf_gain_lin = std::pow(10.0, cfg.calibration.beamforming_gain_db / 10.0);
  r.irc_rejection_lin = std::pow(10.0, -cfg.calibration.irc_suppression_db / 10.0);
  if (cfg.calibration.sinr_ceiling_db > 0)
    r.sinr_ceiling_lin = std::pow(10.0, cfg.calibration.sinr_ceiling_db / 10.0);
  return r;
}

namespace {
constexpr double kLn10Over10 = 0.23025850929940457;
}

double serving_power_mw(const RadioContext& radio, const Deployment& dep,
                        const FadingField& fading, int ue, int rbg) {
  const int serving = dep.ues[ue].serving_cell;
  return radio.tx_power_per_prb_mw * radio.bf_gain_lin *
         std::exp(kLn10Over10 *
                  (dep.link_gain_db[serving][ue] + fading.gain_db(serving, ue, rbg)));
}

double interference_mw(const RadioContext& radio, const Deployment& dep,
                       const FadingField& fading, const ActivityMap& activity, int ue,
                       int rbg) {
  const int serving = dep.ues[ue].serving_cell;
  double interference = 0;
  double top[3] = {0, 0, 0};
  for (int c = 0; c < dep.n_cells(); ++c) {
    if (c == serving || !activity.active(c, rbg)) continue;
    const double p = radio.tx_power_per_prb_mw *
                     std::exp(kLn10Over10 *
                              (dep.link_gain_db[c][ue] + fading.gain_db(c, ue, rbg)));
    interference += p;
    if (p > top[0]) {
      top[2] = top[1];
      top[1] = top[0];
      top[0] = p;
    } else if (p > top[1]) {
      top[2] = top[1];
      top[1] = p;
    } else if (p > top[2]) {
      top[2] = p;
    }
  }
  // IRC-style rejection of the strongest active interferers (the four
  // receive ports leave degrees of freedom beyond the rank-1 signal)
  return interference - (top[0] + top[1] + top[2]) * (1.0 - radio.irc_rejection_lin);
}

double sinr_db(const RadioContext& radio, const Deployment& dep, const FadingField& fading,
               const ActivityMap& activity, int ue, int rbg) {
  const double s = serving_power_mw(radio, dep, fading, ue, rbg);
  const double i = interference_mw(radio, dep, fading, activity, ue, rbg);
  return 10.0 * std::log10(radio.cap_sinr_lin(s / (i + radio.noise_per_prb_mw)));
}

}  // namespace xrsim
