#include "oamsim/emitter.hpp"

#include <cmath>

#include "doctest.h"
#include "oamsim/errors.hpp"

using namespace oamsim;

namespace {
const ResonatorParams kResonator{};
const EmitterParams kEmitter{};
}  // namespace

TEST_CASE("emission_efficiency: published endpoints and monotonicity") {
  CHECK(emission_efficiency(1, kEmitter) == doctest::Approx(0.0197).epsilon(1e-12));
  CHECK(emission_efficiency(-1, kEmitter) == doctest::Approx(0.0197).epsilon(1e-12));
  CHECK(emission_efficiency(6, kEmitter) == doctest::Approx(0.0093).epsilon(1e-12));
  for (int a = 1; a < 6; ++a)
    CHECK(emission_efficiency(a, kEmitter) >= emission_efficiency(a + 1, kEmitter));
  // every charge used in the experiment lies inside the published range
  for (int l : {2, 3, 4, 5, 6, -1, -2, -3, -4, -5, -6}) {
    const double e = emission_efficiency(l, kEmitter);
    CHECK(e >= 0.0093 - 1e-12);
    CHECK(e <= 0.0197 + 1e-12);
  }
  CHECK_THROWS_AS(emission_efficiency(0, kEmitter), UnknownChargeError);
  CHECK_THROWS_AS(emission_efficiency(7, kEmitter), UnknownChargeError);
}

TEST_CASE("default_spectrum: uniform leakage arithmetic for l = 3") {
  const ChargeSpectrum s = default_spectrum(3, kEmitter);
  CHECK(s[spectrum_index(3)] == doctest::Approx(0.85).epsilon(1e-15));
  for (int m = kBasisMin; m <= kBasisMax; ++m) {
    if (m == 3) continue;
    CHECK(s[spectrum_index(m)] == doctest::Approx(0.0125).epsilon(1e-12));
  }
  CHECK(s[spectrum_index(-7)] == 0.0);
  CHECK(s[spectrum_index(7)] == 0.0);
  double sum = 0.0;
  for (double w : s) sum += w;
  CHECK(std::abs(sum - 1.0) <= 1e-12);
}

TEST_CASE("purity_of: delta, uniform, and default spectra") {
  ChargeSpectrum delta{};
  delta[spectrum_index(-2)] = 1.0;
  CHECK(purity_of(delta, -2) == doctest::Approx(1.0).epsilon(1e-15));

  ChargeSpectrum uniform{};
  for (int m = kBasisMin; m <= kBasisMax; ++m) uniform[spectrum_index(m)] = 1.0 / 13.0;
  CHECK(purity_of(uniform, 0) == doctest::Approx(1.0 / 13.0).epsilon(1e-12));

  for (int l = kBasisMin; l <= kBasisMax; ++l)
    CHECK(purity_of(default_spectrum(l, kEmitter), l) == doctest::Approx(0.85).epsilon(1e-12));

  // mass parked outside the basis gives a zero denominator
  ChargeSpectrum outside{};
  outside[spectrum_index(7)] = 1.0;
  CHECK_THROWS_AS(purity_of(outside, 0), DomainError);
}

TEST_CASE("try_emit: midway wavelength passes through on the bus") {
  const DriveSetting zero{};
  CHECK_FALSE(try_emit(kResonator.lambda_ref_nm + 0.25, zero, kResonator, kEmitter).has_value());
}

TEST_CASE("try_emit: order 284 aligned yields charge 4 with lL = 5, lR = 3") {
  const double power = required_power_mw(4, 1557.32, kResonator);
  const DriveSetting drive = drive_for_power(power, kResonator);
  const auto photon = try_emit(1557.32, drive, kResonator, kEmitter);
  REQUIRE(photon.has_value());
  CHECK(photon->charge == 4);
  CHECK(photon->l_left == 5);
  CHECK(photon->l_right == 3);
  CHECK(photon->l_left - photon->l_right == 2);
  CHECK((photon->l_left + photon->l_right) / 2 == photon->charge);
  CHECK(purity_of(photon->spectrum, 4) == doctest::Approx(0.85).epsilon(1e-12));
}

TEST_CASE("try_emit: some exactly when aligned_order is some; off-resonance means no conversion") {
  const DriveSetting drive = drive_for_power(7.25, kResonator);
  for (int i = 0; i <= 400; ++i) {
    const double lambda = 1550.0 + i * 0.005;
    const auto order = aligned_order(lambda, drive, kResonator, 0.5 * kResonator.fwhm_nm);
    const bool off_resonance =
        transmission(lambda, drive, kResonator) > 1.0 - 0.5 * kResonator.dip_depth;
    if (order && std::abs(charge_of_order(*order, kResonator)) > kBasisMax) {
      // alignment onto a charge the emitter model cannot represent
      CHECK_THROWS_AS(try_emit(lambda, drive, kResonator, kEmitter), UnknownChargeError);
      continue;
    }
    const auto photon = try_emit(lambda, drive, kResonator, kEmitter);
    CHECK(photon.has_value() == order.has_value());
    // transmission above the half-depth level implies the photon stayed on the bus
    if (off_resonance) CHECK_FALSE(photon.has_value());
  }
}

TEST_CASE("try_emit: circular decomposition holds for every emitted charge") {
  for (int l : {2, 3, 4, 5, 6, -1, -2, -3, -4, -5, -6}) {
    const double target = l > 0 ? 1557.32 : 1547.72;
    const DriveSetting drive = drive_for_power(required_power_mw(l, target, kResonator), kResonator);
    const auto photon = try_emit(target, drive, kResonator, kEmitter);
    REQUIRE(photon.has_value());
    CHECK(photon->charge == l);
    CHECK(photon->l_left == l + 1);
    CHECK(photon->l_right == l - 1);
    CHECK(purity_of(photon->spectrum, l) >= 0.80);  // "larger than 80%"
  }
}

TEST_CASE("spectrum overrides replace the uniform default") {
  EmitterParams params = kEmitter;
  ChargeSpectrum custom{};
  custom[spectrum_index(2)] = 0.7;
  custom[spectrum_index(1)] = 0.2;
  custom[spectrum_index(7)] = 0.1;
  params.spectrum_overrides[2] = custom;
  const ChargeSpectrum s = default_spectrum(2, params);
  CHECK(s[spectrum_index(2)] == doctest::Approx(0.7));
  // purity excludes the +-7 component from the denominator
  CHECK(purity_of(s, 2) == doctest::Approx(0.7 / 0.9).epsilon(1e-12));
}

TEST_CASE("emitter validation: malformed tables rejected") {
  EmitterParams params = kEmitter;
  params.purity_target = 0.0;
  CHECK_THROWS_AS(params.validate(), ValidationError);

  EmitterParams increasing = kEmitter;
  increasing.efficiency_by_abs_charge[3] = 0.05;  // breaks monotonicity
  CHECK_THROWS_AS(increasing.validate(), ValidationError);

  EmitterParams bad_spectrum = kEmitter;
  ChargeSpectrum s{};
  s[spectrum_index(0)] = 0.5;  // sums to 0.5
  bad_spectrum.spectrum_overrides[0] = s;
  CHECK_THROWS_AS(bad_spectrum.validate(), ValidationError);
}
