#include "oamsim/config.hpp"

#include "doctest.h"
#include "oamsim/errors.hpp"

using namespace oamsim;

TEST_CASE("empty config text yields the paper defaults") {
  const ExperimentConfig cfg = ExperimentConfig::from_string("");
  CHECK(cfg.pump.lambda_p_nm == doctest::Approx(1552.5));
  CHECK(cfg.pump.rep_rate_hz == doctest::Approx(4.0e7));
  CHECK(cfg.pump.duration_s == doctest::Approx(600.0));
  CHECK(cfg.resonator.fsr_nm == doctest::Approx(0.5));
  CHECK(cfg.resonator.fwhm_nm == doctest::Approx(0.045));
  CHECK(cfg.resonator.n_waveguides == 32);
  CHECK(cfg.resonator.charge_offset == 24);
  CHECK(cfg.loss.coupling_in_db == doctest::Approx(7.0));
  CHECK(cfg.loss.sww_db == doctest::Approx(1.0));
  CHECK(cfg.loss.objective_coupling == doctest::Approx(0.40));
  CHECK(cfg.emitter.purity_target == doctest::Approx(0.85));
  CHECK(cfg.spad_signal.jitter_sigma_ps == doctest::Approx(60.0));
  CHECK(cfg.analysis.window_ps == doctest::Approx(320.0));
  CHECK(cfg.run.lambda_s_neg_nm == doctest::Approx(1547.72));
  CHECK(cfg.targets.cc == doctest::Approx(77900.0));
}

TEST_CASE("invalid values produce validation errors naming the invariant") {
  CHECK_THROWS_WITH_AS(ExperimentConfig::from_string("[resonator]\nfsr_nm = -1\n"),
                       "resonator: violated invariant: fsr_nm > fwhm_nm > 0", ValidationError);
  CHECK_THROWS_AS(ExperimentConfig::from_string("[spad_signal]\ndet_efficiency = 0\n"),
                  ValidationError);
  CHECK_THROWS_AS(ExperimentConfig::from_string("[analysis]\nspan_ps = 1000\n"),
                  ValidationError);
}

TEST_CASE("parse errors carry line information") {
  try {
    ExperimentConfig::from_string("[pump]\nlambda_p_nm 1552.5\n");
    FAIL("expected ConfigParseError");
  } catch (const ConfigParseError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  try {
    ExperimentConfig::from_string("[pump]\nlambda_p_nm = fast\n");
    FAIL("expected ConfigParseError");
  } catch (const ConfigParseError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("unknown keys are rejected") {
  CHECK_THROWS_AS(ExperimentConfig::from_string("[pump]\nlambda_pump = 1552.5\n"),
                  ConfigParseError);
  CHECK_THROWS_AS(ExperimentConfig::from_string("[pmup]\nlambda_p_nm = 1552.5\n"),
                  ConfigParseError);
}

TEST_CASE("serialize/parse round trip reproduces an equal parameter set") {
  ExperimentConfig cfg;
  cfg.pump.duration_s = 12.5;
  cfg.source.mu = 4.25e-3;
  cfg.source.law = PairNumberLaw::thermal;
  cfg.resonator.dip_depth = 0.55;
  cfg.spad_idler.dark_prob_per_gate = 3.5e-5;
  ChargeSpectrum custom{};
  custom[spectrum_index(2)] = 0.9;
  custom[spectrum_index(0)] = 0.1;
  cfg.emitter.spectrum_overrides[2] = custom;

  const std::string once = cfg.serialize();
  const ExperimentConfig parsed = ExperimentConfig::from_string(once);
  CHECK(parsed.serialize() == once);
  CHECK(parsed.hash() == cfg.hash());
  CHECK(parsed.source.law == PairNumberLaw::thermal);
  CHECK(parsed.emitter.spectrum_overrides.at(2)[spectrum_index(2)] == doctest::Approx(0.9));
}

TEST_CASE("config hash is stable and sensitive") {
  ExperimentConfig a, b;
  CHECK(a.hash() == b.hash());
  b.source.mu *= 1.0000001;
  CHECK(a.hash() != b.hash());
}

TEST_CASE("comments, blank lines and section reopening are tolerated") {
  const std::string text =
      "# heater profile\n"
      "[resonator]\n"
      "dip_depth = 0.5\n"
      "\n"
      "; spads\n"
      "[spad_signal]\n"
      "jitter_sigma_ps = 45\n"
      "[resonator]\n"
      "fwhm_nm = 0.05\n";
  const ExperimentConfig cfg = ExperimentConfig::from_string(text);
  CHECK(cfg.resonator.dip_depth == doctest::Approx(0.5));
  CHECK(cfg.resonator.fwhm_nm == doctest::Approx(0.05));
  CHECK(cfg.spad_signal.jitter_sigma_ps == doctest::Approx(45.0));
}
