// SPDX-License-Identifier: Apache-2.0
//
// Batch front end: run single scenarios, sweep XR load / rate / eMBB
// presence, search capacity, and emit plot-ready CSV data.

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "xrsim/campaign.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> overrides;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int runs = 0;
  std::string out_dir = "out";
  int parallel = 1;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "scenario config file");
  cmd->add_option("--set", args.overrides, "override, key=value (repeatable)");
  cmd->add_option("--seed", args.seed, "base RNG seed")->each([&](const std::string&) {
    args.seed_set = true;
  });
  cmd->add_option("--runs", args.runs, "simulation runs per point");
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--parallel", args.parallel, "worker threads across runs");
}

xrsim::ScenarioConfig build_config(const CommonArgs& args) {
  xrsim::ScenarioConfig cfg = args.config_path.empty()
                                  ? xrsim::default_scenario()
                                  : xrsim::load_config(args.config_path);
  for (const std::string& kv : args.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw xrsim::ConfigError("--set expects key=value, got '" + kv + "'");
    xrsim::apply_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (args.seed_set) cfg.rng_seed = args.seed;
  if (args.runs > 0) cfg.n_runs = args.runs;
  xrsim::validate_or_throw(cfg);
  return cfg;
}

void print_progress(const xrsim::SweepPoint& pt, int done, int total) {
  std::printf("[%3d/%3d] sdr=%g n_xr=%d embb=%d\n", done, total, pt.sdr_mbps, pt.n_xr,
              pt.embb ? 1 : 0);
  std::fflush(stdout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"xrsim - system-level simulator for mixed XR / best-effort 5G TDD downlink"};
  app.require_subcommand(1);

  CommonArgs run_args, sweep_args, cap_args;
  bool dump_layout = false, dump_arrivals = false, dump_grants = false;

  CLI::App* cmd_run = app.add_subcommand("run", "simulate one scenario and write result files");
  add_common(cmd_run, run_args);
  cmd_run->add_flag("--dump-layout", dump_layout, "also write layout.csv");
  cmd_run->add_flag("--dump-arrivals", dump_arrivals, "also write arrivals.csv");
  cmd_run->add_flag("--trace-grants", dump_grants, "also write grants.csv (first run)");

  std::vector<int> nxr_axis{1, 2, 3, 4, 5, 6, 7, 8};
  std::vector<double> sdr_axis{30, 45};
  std::vector<double> pdb_axis{5, 10, 15, 20, 30};
  std::string embb_axis = "both";

  CLI::App* cmd_sweep = app.add_subcommand("sweep", "sweep XR load and emit campaign.json");
  add_common(cmd_sweep, sweep_args);
  cmd_sweep->add_option("--nxr", nxr_axis, "XR UEs per cell axis");
  cmd_sweep->add_option("--sdr", sdr_axis, "XR source data rates, Mbps");
  cmd_sweep->add_option("--pdb", pdb_axis, "packet delay budgets, ms (post-processing)");
  cmd_sweep->add_option("--embb", embb_axis, "eMBB presence: on|off|both");

  CLI::App* cmd_capacity =
      app.add_subcommand("capacity", "sweep + capacity/loss per (sdr, pdb, embb)");
  add_common(cmd_capacity, cap_args);
  cmd_capacity->add_option("--nxr", nxr_axis, "XR UEs per cell axis (contiguous)");
  cmd_capacity->add_option("--sdr", sdr_axis, "XR source data rates, Mbps");
  cmd_capacity->add_option("--pdb", pdb_axis, "packet delay budgets, ms");
  cmd_capacity->add_option("--embb", embb_axis, "eMBB presence: on|off|both");

  std::string report_in, report_out = "report";
  CLI::App* cmd_report = app.add_subcommand("report", "figure CSVs from a stored campaign");
  cmd_report->add_option("--in", report_in, "directory holding campaign.json")->required();
  cmd_report->add_option("--out", report_out, "output directory");

  std::string mcs_out = "mcs_table.csv";
  double mcs_gap = xrsim::default_scenario().calibration.shannon_gap_db;
  CLI::App* cmd_mcs = app.add_subcommand("dump-mcs", "write the MCS table as CSV");
  cmd_mcs->add_option("--out", mcs_out, "output file");
  cmd_mcs->add_option("--gap", mcs_gap, "Shannon gap anchoring the 10% BLEP points, dB");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_run->parsed()) {
      const xrsim::ScenarioConfig cfg = build_config(run_args);
      const auto results =
          xrsim::run_campaign(cfg, cfg.n_runs, cfg.rng_seed, run_args.parallel);
      xrsim::write_run_files(run_args.out_dir, cfg, results);
      if (dump_layout)
        xrsim::write_layout_csv(run_args.out_dir + "/layout.csv", cfg, cfg.rng_seed + 1);
      if (dump_arrivals)
        xrsim::write_arrivals_csv(run_args.out_dir + "/arrivals.csv", cfg, cfg.rng_seed + 1);
      if (dump_grants) {
        xrsim::RunTrace trace;
        xrsim::run(cfg, cfg.rng_seed + 1, &trace);
        xrsim::write_grant_trace_csv(run_args.out_dir + "/grants.csv", trace);
      }
      std::printf("wrote %s/{config.cfg,frames.csv,ues.csv,cells.csv,summary.json}\n",
                  run_args.out_dir.c_str());
      return 0;
    }

    if (cmd_sweep->parsed() || cmd_capacity->parsed()) {
      const CommonArgs& args = cmd_sweep->parsed() ? sweep_args : cap_args;
      xrsim::ExperimentPlan plan;
      plan.base = build_config(args);
      plan.n_xr = nxr_axis;
      plan.sdr_mbps = sdr_axis;
      plan.pdb_ms = pdb_axis;
      if (embb_axis == "on") plan.embb = {true};
      else if (embb_axis == "off") plan.embb = {false};
      else if (embb_axis == "both") plan.embb = {false, true};
      else throw xrsim::ConfigError("--embb must be on|off|both");
      plan.runs_per_point = plan.base.n_runs;
      plan.base_seed = plan.base.rng_seed;
      plan.n_threads = args.parallel;

      const xrsim::CampaignResult campaign = xrsim::run_sweep(plan, print_progress);
      std::filesystem::create_directories(args.out_dir);
      xrsim::write_campaign_json(args.out_dir + "/campaign.json", campaign);
      xrsim::write_report_files(args.out_dir, campaign);
      if (cmd_capacity->parsed()) {
        for (const auto& curve : xrsim::capacity_curves(campaign))
          for (const auto& [pdb, cap] : curve.capacity_by_pdb)
            std::printf("capacity sdr=%g embb=%d pdb=%g -> %d UE/cell\n", curve.sdr_mbps,
                        curve.embb ? 1 : 0, pdb, cap);
      }
      std::printf("wrote %s/campaign.json and figure CSVs\n", args.out_dir.c_str());
      return 0;
    }

    if (cmd_report->parsed()) {
      const auto campaign = xrsim::read_campaign_json(report_in + "/campaign.json");
      xrsim::write_report_files(report_out, campaign);
      std::printf("wrote figure CSVs to %s/\n", report_out.c_str());
      return 0;
    }

    if (cmd_mcs->parsed()) {
      xrsim::write_mcs_csv(mcs_out, mcs_gap);
      std::printf("wrote %s\n", mcs_out.c_str());
      return 0;
    }
  } catch (const xrsim::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  } catch (const xrsim::IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
