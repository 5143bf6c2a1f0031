// oamsim: stochastic simulator for an on-chip heralded single-photon source
// with thermo-optically switchable OAM modes.
//
// Subcommands: run (sww-only or one OAM charge), sweep (transmission
// spectrum), tomography (mode-purity estimation), calibrate (fit mu, dark
// rates and heater resistance to published aggregates).

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "oamsim/config.hpp"
#include "oamsim/errors.hpp"
#include "oamsim/scenario.hpp"

namespace {

int exit_code_for(const std::string& category) {
  if (category == "config_parse") return 2;
  if (category == "validation") return 3;
  if (category == "unreachable_charge") return 4;
  if (category == "infeasible_calibration") return 5;
  if (category == "io") return 6;
  return 10;
}

void print_error(const std::string& category, const std::string& message) {
  nlohmann::ordered_json j;
  j["error"] = {{"category", category}, {"message", message}};
  std::cerr << j.dump() << "\n";
}

struct CliOptions {
  std::string config_path;
  std::uint64_t seed = 1;
  std::string out_path;
  std::string format = "json";
  int workers = 1;
  std::optional<std::uint64_t> pulses;
  std::optional<int> charge;
  std::string hist_csv;
  std::string tags_csv;
  bool tag_origin = false;
  std::uint64_t shots = 1000000;
  double sweep_from = 1545.0, sweep_to = 1560.0, sweep_step = 0.002, sweep_power = 0.0;
};

oamsim::ExperimentConfig load(const CliOptions& opt) {
  if (opt.config_path.empty()) return oamsim::ExperimentConfig{};
  return oamsim::ExperimentConfig::from_file(opt.config_path);
}

void deliver(const oamsim::RunReport& report, const CliOptions& opt) {
  const auto format =
      opt.format == "csv" ? oamsim::ReportFormat::csv : oamsim::ReportFormat::json;
  if (opt.out_path.empty()) {
    std::cout << (format == oamsim::ReportFormat::json ? report.to_json() : report.to_csv());
  } else {
    oamsim::emit_report(report, format, opt.out_path);
  }
  if (!opt.hist_csv.empty() && report.coincidence)
    oamsim::write_histogram_csv(report.coincidence->histogram, opt.hist_csv);
  std::cerr << "completed " << oamsim::to_string(report.kind) << " in " << report.wall_seconds
            << " s\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"heralded single-photon OAM source simulator"};
  app.require_subcommand(1);
  CliOptions opt;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", opt.config_path, "experiment config file (defaults when omitted)");
    cmd->add_option("--seed", opt.seed, "random seed");
    cmd->add_option("--out", opt.out_path, "output path (stdout when omitted)");
    cmd->add_option("--format", opt.format, "output format")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--workers", opt.workers, "worker threads (0 = all cores)");
  };

  CLI::App* run = app.add_subcommand("run", "coincidence run: silicon wire only, or one OAM charge");
  add_common(run);
  run->add_option("--charge", [&](const CLI::results_t& r) {
        opt.charge = std::stoi(r[0]);
        return true;
      },
      "OAM topological charge (omit for the sww-only run)");
  run->add_option("--pulses", [&](const CLI::results_t& r) {
        opt.pulses = std::stoull(r[0]);
        return true;
      },
      "override the pulse count (quick runs with proportional expectations)");
  run->add_option("--hist-csv", opt.hist_csv, "also write the delay histogram as CSV");
  run->add_option("--export-tags", opt.tags_csv, "write raw time tags as CSV");
  run->add_flag("--tag-origin", opt.tag_origin, "include the origin column in the time-tag CSV");

  CLI::App* sweep = app.add_subcommand("sweep", "transmission spectrum sweep at fixed drive");
  add_common(sweep);
  sweep->add_option("--from", opt.sweep_from, "start wavelength, nm");
  sweep->add_option("--to", opt.sweep_to, "stop wavelength, nm");
  sweep->add_option("--step", opt.sweep_step, "grid step, nm");
  sweep->add_option("--power", opt.sweep_power, "heater power, mW");

  CLI::App* tomo = app.add_subcommand("tomography", "15-mask mode-purity measurement");
  add_common(tomo);
  tomo->add_option("--charge", [&](const CLI::results_t& r) {
        opt.charge = std::stoi(r[0]);
        return true;
      },
      "target OAM charge")->required();
  tomo->add_option("--shots", opt.shots, "shots per mask (0 = noiseless expectation)");

  CLI::App* cal = app.add_subcommand("calibrate", "fit mu, dark rates and heater resistance");
  add_common(cal);

  CLI11_PARSE(app, argc, argv);

  try {
    const oamsim::ExperimentConfig cfg = load(opt);
    oamsim::Scenario sc;
    sc.seed = opt.seed;
    sc.workers = opt.workers;
    sc.charge = opt.charge;
    sc.pulses_override = opt.pulses;
    sc.tomography_shots = opt.shots;

    if (run->parsed()) {
      sc.kind = opt.charge ? oamsim::ScenarioKind::oam_run : oamsim::ScenarioKind::sww_only;
    } else if (sweep->parsed()) {
      sc.kind = oamsim::ScenarioKind::spectrum_sweep;
      sc.sweep = {opt.sweep_from, opt.sweep_to, opt.sweep_step, opt.sweep_power};
    } else if (tomo->parsed()) {
      sc.kind = oamsim::ScenarioKind::tomography;
    } else {
      sc.kind = oamsim::ScenarioKind::calibrate;
    }

    std::ofstream tags;
    if (!opt.tags_csv.empty() && run->parsed()) {
      tags.open(opt.tags_csv, std::ios::binary);
      if (!tags) throw oamsim::IoError("cannot open time-tag path: " + opt.tags_csv);
      tags.precision(15);
      tags << (opt.tag_origin ? "arm,time_ps,origin\n" : "arm,time_ps\n");
      sc.click_tap = [&tags, &opt](const oamsim::ClickStreams& clicks) {
        auto write = [&](const oamsim::ClickRecord& c, const char* arm) {
          tags << arm << "," << c.time_ps;
          if (opt.tag_origin)
            tags << "," << (c.origin == oamsim::ClickRecord::Origin::pair ? "pair" : "dark");
          tags << "\n";
        };
        // merge the two sorted arms into one chronological file
        std::size_t i = 0, j = 0;
        while (i < clicks.signal.size() || j < clicks.idler.size()) {
          const bool take_signal =
              j >= clicks.idler.size() ||
              (i < clicks.signal.size() && clicks.signal[i].time_ps <= clicks.idler[j].time_ps);
          if (take_signal)
            write(clicks.signal[i++], "signal");
          else
            write(clicks.idler[j++], "idler");
        }
      };
    }

    const oamsim::RunReport report = oamsim::run_scenario(sc, cfg);
    deliver(report, opt);
    return 0;
  } catch (const oamsim::Error& e) {
    print_error(e.category(), e.what());
    return exit_code_for(e.category());
  } catch (const std::exception& e) {
    print_error("internal", e.what());
    return 1;
  }
}
