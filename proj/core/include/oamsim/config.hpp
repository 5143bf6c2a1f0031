#pragma once

#include <cstdint>
#include <string>

#include "oamsim/analysis.hpp"
#include "oamsim/detection.hpp"
#include "oamsim/emitter.hpp"
#include "oamsim/resonator.hpp"
#include "oamsim/source.hpp"

// Experiment configuration: a small sectioned key=value text format, one
// section per module, every key optional. The defaults are the calibrated
// profile that reproduces the published SWW and OAM-mode aggregates.

namespace oamsim {

struct SourceParams {
  double mu = 0.023741916356789988;  // calibrated, see calibrate()
  PairNumberLaw law = PairNumberLaw::poisson;

  void validate() const;
};

struct AnalysisParams {
  double bin_width_ps = 64.0;
  double window_ps = 320.0;
  double span_ps = 180000.0;  // covers the 7 side periods either side
  int acc_side_peaks = 14;

  void validate() const;
};

struct RunParams {
  // fixed signal wavelengths: positive charges probe the long side of the
  // pump, negative charges the short side
  double lambda_s_pos_nm = 1557.32;
  double lambda_s_neg_nm = 1547.72;
  std::uint64_t block_size = 1ULL << 22;
  double raman_guard_linewidths = 3.0;

  void validate() const;
};

struct CalibrationTargets {
  double cc = 77.9e3;
  double car_min = 34.09;
  double car_max = 52.05;
  double anchor_voltage_v = 13.97;
  int anchor_charge = 4;
  double anchor_lambda_nm = 1557.32;

  double car_mid() const { return 0.5 * (car_min + car_max); }
  void validate() const;
};

struct ExperimentConfig {
  PumpConfig pump;
  SourceParams source;
  ResonatorParams resonator;
  EmitterParams emitter;
  LossBudget loss;
  SpadParams spad_signal;
  SpadParams spad_idler;
  AnalysisParams analysis;
  RunParams run;
  CalibrationTargets targets;

  void validate() const;

  // canonical text form: stable section and key order, shortest
  // round-trip doubles
  std::string serialize() const;
  // FNV-1a 64 over the canonical form, hex
  std::string hash() const;

  static ExperimentConfig from_string(const std::string& text);
  static ExperimentConfig from_file(const std::string& path);
};

}  // namespace oamsim
