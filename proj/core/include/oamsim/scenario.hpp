#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "oamsim/analysis.hpp"
#include "oamsim/config.hpp"

// Experiment orchestration: scenario execution over a deterministic
// block-parallel Monte Carlo engine, the calibration inverse problem, and
// report emission. (config, seed) fully determine every output byte
// regardless of worker count.

namespace oamsim {

enum class ScenarioKind { sww_only, oam_run, spectrum_sweep, tomography, calibrate };

const char* to_string(ScenarioKind kind);

struct SweepSpec {
  double from_nm = 1545.0;
  double to_nm = 1560.0;
  double step_nm = 0.002;
  double power_mw = 0.0;
};

struct Scenario {
  ScenarioKind kind = ScenarioKind::sww_only;
  std::optional<int> charge;
  std::uint64_t seed = 1;
  std::optional<std::uint64_t> pulses_override;
  int workers = 1;  // 0 = hardware concurrency
  std::uint64_t tomography_shots = 1000000;
  SweepSpec sweep;
  // observes each block's sorted click streams during coincidence runs
  // (time-tag export); never affects the report
  std::function<void(const ClickStreams&)> click_tap;

  void validate() const;
};

struct CoincidenceOutcome {
  std::uint64_t cc = 0;
  std::vector<std::uint64_t> acc;
  CarStats car;
  ExpectedCounts expected;  // windowed oracle at the run parameters
  TcspcHistogram histogram;
  std::uint64_t signal_clicks = 0;
  std::uint64_t idler_clicks = 0;
};

struct DriveReport {
  int order = 0;
  int charge = 0;
  int l_left = 0;
  int l_right = 0;
  double power_mw = 0.0;
  double voltage_v = 0.0;
  double lambda_s_nm = 0.0;
  double lambda_i_nm = 0.0;
};

struct DipEstimate {
  double center_nm = 0.0;
  double fwhm_nm = 0.0;
  double depth = 0.0;
};

struct SweepOutcome {
  std::vector<std::pair<double, double>> points;  // (lambda_nm, transmission)
  std::vector<DipEstimate> dips;
  double power_mw = 0.0;
};

struct CalibrationPatch {
  double mu = 0.0;
  double dark_s = 0.0;
  double dark_i = 0.0;
  double heater_ohms = 0.0;
  double cc_residual = 0.0;
  double car_residual = 0.0;
};

struct RunReport {
  ScenarioKind kind = ScenarioKind::sww_only;
  std::optional<int> charge;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::uint64_t pulses_simulated = 0;
  std::uint64_t emitting_pulses = 0;
  std::optional<CoincidenceOutcome> coincidence;
  std::optional<PurityEstimate> purity;
  std::uint64_t tomography_shots = 0;
  std::optional<SweepOutcome> sweep;
  std::optional<CalibrationPatch> calibration;
  std::optional<DriveReport> drive;
  std::optional<double> pre_detection_cc;
  double period_ns = 25.0;
  double window_ps = 320.0;
  std::vector<std::string> warnings;
  double wall_seconds = 0.0;  // console diagnostics only, never serialized

  std::string to_json() const;
  std::string to_csv() const;  // format depends on the scenario kind
};

// Deterministic block-parallel Monte Carlo pass producing the delay
// histogram. Exposed for tests; scenarios drive it internally.
struct EngineSettings {
  std::uint64_t n_pulses = 0;
  double period_ps = 25000.0;
  double mu = 0.0;
  PairNumberLaw law = PairNumberLaw::poisson;
  double survival_s = 0.0;
  double survival_i = 0.0;
  SpadParams spad_s;
  SpadParams spad_i;
  std::uint64_t seed = 1;
  std::uint64_t block_size = 1ULL << 22;
  int workers = 1;
  double bin_width_ps = 64.0;
  double span_ps = 180000.0;
  // invoked in block order with each block's sorted click streams
  std::function<void(const ClickStreams&)> tap;
};

struct EngineOutcome {
  TcspcHistogram histogram;
  std::uint64_t emitting_pulses = 0;
  std::uint64_t signal_clicks = 0;
  std::uint64_t idler_clicks = 0;
};

EngineOutcome run_engine(const EngineSettings& settings);

RunReport run_scenario(const Scenario& scenario, const ExperimentConfig& config);

// Solves (mu, dark_s, dark_i) so the windowed oracle reproduces the target
// CC and mean CAR under the configured loss budget (darks assumed
// symmetric), and heater_ohms from the published voltage anchor. Throws
// InfeasibleCalibrationError when no nonnegative solution exists.
CalibrationPatch calibrate(const CalibrationTargets& targets, const ExperimentConfig& config);

// Expected coincidences per acquisition with the per-charge detection-path
// loss removed from the signal arm (the "usable pairs" estimate).
double pre_detection_cc_estimate(const ExperimentConfig& config, int charge, double n_pulses);

enum class ReportFormat { json, csv };

void emit_report(const RunReport& report, ReportFormat format, const std::string& path);
void write_histogram_csv(const TcspcHistogram& hist, const std::string& path);

}  // namespace oamsim
