#include "oamsim/resonator.hpp"

#include <cmath>

#include "doctest.h"
#include "oamsim/errors.hpp"

using namespace oamsim;

namespace {
const ResonatorParams kDefaults{};

// brute-force comb sum over many neighbors, independent of the closed-form
// evaluation inside transmission()
double comb_sum_brute(double detuning_nm, const ResonatorParams& p, int neighbors) {
  const double h = 0.5 * p.fwhm_nm;
  double sum = 0.0;
  for (int k = -neighbors; k <= neighbors; ++k) {
    const double d = detuning_nm - k * p.fsr_nm;
    sum += h * h / (d * d + h * h);
  }
  return sum;
}
}  // namespace

TEST_CASE("resonance wavelength: reference identity and comb spacing") {
  const DriveSetting zero{};
  CHECK(resonance_wavelength(kDefaults.order_ref, zero, kDefaults) ==
        doctest::Approx(kDefaults.lambda_ref_nm).epsilon(1e-15));
  // adjacent order sits one FSR (0.5 nm) shorter
  CHECK(resonance_wavelength(kDefaults.order_ref + 1, zero, kDefaults) ==
        doctest::Approx(kDefaults.lambda_ref_nm - 0.5).epsilon(1e-15));
}

TEST_CASE("resonance wavelength: red shift is exactly slope * power") {
  for (double power : {0.5, 3.0, 21.0, 99.0}) {
    const DriveSetting drive = drive_for_power(power, kDefaults);
    const double shift = resonance_wavelength(kDefaults.order_ref, drive, kDefaults) -
                         resonance_wavelength(kDefaults.order_ref, DriveSetting{}, kDefaults);
    CHECK(shift == doctest::Approx(kDefaults.thermo_slope_nm_per_mw * power).epsilon(1e-12));
  }
  // strictly increasing in power, strictly decreasing in order
  const DriveSetting lo = drive_for_power(1.0, kDefaults);
  const DriveSetting hi = drive_for_power(2.0, kDefaults);
  CHECK(resonance_wavelength(290, hi, kDefaults) > resonance_wavelength(290, lo, kDefaults));
  CHECK(resonance_wavelength(291, lo, kDefaults) < resonance_wavelength(290, lo, kDefaults));
}

TEST_CASE("transmission: on-resonance and half-width levels") {
  const DriveSetting zero{};
  const double on_res = transmission(kDefaults.lambda_ref_nm, zero, kDefaults);
  // comb tails push the dip a little below the single-Lorentzian level
  CHECK(on_res == doctest::Approx(1.0 - kDefaults.dip_depth).epsilon(0.01));
  CHECK(on_res < 1.0 - kDefaults.dip_depth + 1e-12);

  const double half = transmission(kDefaults.lambda_ref_nm + 0.5 * kDefaults.fwhm_nm, zero,
                                   kDefaults);
  CHECK(half == doctest::Approx(1.0 - 0.5 * kDefaults.dip_depth).epsilon(0.01));
}

TEST_CASE("transmission: midway point vs brute-force Lorentzian sum") {
  const DriveSetting zero{};
  const double mid = transmission(kDefaults.lambda_ref_nm + 0.5 * kDefaults.fsr_nm, zero,
                                  kDefaults);
  CHECK(mid >= 0.99);  // default params

  // independent oracle: direct partial sum + analytic tail bound
  const int neighbors = 200000;
  const double brute = comb_sum_brute(0.5 * kDefaults.fsr_nm, kDefaults, neighbors);
  const double h = 0.5 * kDefaults.fwhm_nm;
  const double tail_bound = 2.0 * h * h / (kDefaults.fsr_nm * kDefaults.fsr_nm * neighbors);
  CHECK(std::abs((1.0 - mid) / kDefaults.dip_depth - brute) <= tail_bound + 1e-12);
}

TEST_CASE("transmission: bounded and symmetric about every resonance") {
  const DriveSetting drive = drive_for_power(13.0, kDefaults);
  for (int i = 0; i <= 2000; ++i) {
    const double lambda = 1544.0 + i * 0.01;
    const double t = transmission(lambda, drive, kDefaults);
    CHECK(t >= 0.0);
    CHECK(t <= 1.0);
  }
  const double res = resonance_wavelength(290, drive, kDefaults);
  for (double delta : {0.001, 0.013, 0.11, 0.249}) {
    CHECK(transmission(res + delta, drive, kDefaults) ==
          doctest::Approx(transmission(res - delta, drive, kDefaults)).epsilon(1e-12));
  }
}

TEST_CASE("aligned_order: exact hit, midway miss, ambiguity guard") {
  const DriveSetting zero{};
  const double tol = 0.5 * kDefaults.fwhm_nm;
  CHECK(aligned_order(resonance_wavelength(289, zero, kDefaults), zero, kDefaults, tol) == 289);
  CHECK_FALSE(aligned_order(kDefaults.lambda_ref_nm + 0.25, zero, kDefaults, tol).has_value());
  CHECK_THROWS_AS(
      aligned_order(kDefaults.lambda_ref_nm + 0.25, zero, kDefaults, 0.3),
      AmbiguousAlignmentError);
}

TEST_CASE("aligned_order: order 308 picked up at 1547.72 nm under its drive") {
  const double power = required_power_mw(-4, 1547.72, kDefaults);
  const DriveSetting drive = drive_for_power(power, kDefaults);
  const auto order = aligned_order(1547.72, drive, kDefaults, 0.5 * kDefaults.fwhm_nm);
  REQUIRE(order.has_value());
  CHECK(*order == 308);
  CHECK(charge_of_order(*order, kDefaults) == -4);
}

TEST_CASE("charge_of_order: all 11 published order/charge pairs") {
  CHECK(charge_of_order(282, kDefaults) == 2);
  CHECK(charge_of_order(283, kDefaults) == 3);
  CHECK(charge_of_order(284, kDefaults) == 4);
  CHECK(charge_of_order(285, kDefaults) == 5);
  CHECK(charge_of_order(286, kDefaults) == 6);
  CHECK(charge_of_order(306, kDefaults) == -6);
  CHECK(charge_of_order(307, kDefaults) == -5);
  CHECK(charge_of_order(308, kDefaults) == -4);
  CHECK(charge_of_order(309, kDefaults) == -3);
  CHECK(charge_of_order(310, kDefaults) == -2);
  CHECK(charge_of_order(311, kDefaults) == -1);
}

TEST_CASE("charge_of_order: offset cancellation, periodicity, fold range") {
  CHECK(charge_of_order(24, kDefaults) == 0);
  for (int p = -80; p <= 400; ++p) {
    const int l = charge_of_order(p, kDefaults);
    CHECK(l == charge_of_order(p + 32, kDefaults));
    CHECK(l > -16);
    CHECK(l <= 16);
  }
}

TEST_CASE("required_power: already-aligned order costs nothing") {
  ResonatorParams p = kDefaults;
  const DriveSetting zero{};
  const double lambda = resonance_wavelength(289, zero, p);
  CHECK(required_power_mw(charge_of_order(289, p), lambda, p) ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("required_power: affine in order at fixed target") {
  // consecutive orders 282..286 and 306..311 lie exactly on lines of slope
  // fsr/slope
  const double step = kDefaults.fsr_nm / kDefaults.thermo_slope_nm_per_mw;
  double prev = required_power_mw(2, 1557.32, kDefaults);
  for (int l = 3; l <= 6; ++l) {
    const double power = required_power_mw(l, 1557.32, kDefaults);
    CHECK(power - prev == doctest::Approx(step).epsilon(1e-12));
    prev = power;
  }
  prev = required_power_mw(-6, 1547.72, kDefaults);
  for (int l = -5; l <= -1; ++l) {
    const double power = required_power_mw(l, 1547.72, kDefaults);
    CHECK(power - prev == doctest::Approx(step).epsilon(1e-12));
    prev = power;
  }
}

TEST_CASE("required_power: 13.97 V anchor for l = 4 at 1557.32 nm") {
  const double power = required_power_mw(4, 1557.32, kDefaults);
  const DriveSetting drive = drive_for_power(power, kDefaults);
  CHECK(drive.voltage_v == doctest::Approx(13.97).epsilon(1e-9));
}

TEST_CASE("required_power: unreachable charge in a narrow band") {
  ResonatorParams p = kDefaults;
  p.band_min_nm = 1554.0;
  p.band_max_nm = 1560.0;  // only ~12 orders, not all residues present
  CHECK_THROWS_AS(required_power_mw(16, 1557.32, p), UnreachableChargeError);
}

TEST_CASE("drive_for_power: zero, round trip, negative rejected") {
  CHECK(drive_for_power(0.0, kDefaults).voltage_v == 0.0);
  for (double power : {0.3, 21.0, 123.4}) {
    const DriveSetting d = drive_for_power(power, kDefaults);
    CHECK(d.power_mw == doctest::Approx(power).epsilon(1e-15));
    CHECK(d.voltage_v * d.voltage_v / kDefaults.heater_ohms ==
          doctest::Approx(power).epsilon(1e-12));
  }
  // V = 13.97 round trip with heater_ohms = 1000 in consistent units
  ResonatorParams p = kDefaults;
  p.heater_ohms = 1000.0;
  const double power = 13.97 * 13.97 / 1000.0;
  CHECK(drive_for_power(power, p).voltage_v == doctest::Approx(13.97).epsilon(1e-12));
  CHECK_THROWS_AS(drive_for_power(-1.0, kDefaults), DomainError);
}

TEST_CASE("params validation names the violated invariant") {
  ResonatorParams p = kDefaults;
  p.fsr_nm = -1.0;
  CHECK_THROWS_WITH_AS(p.validate(),
                       "resonator: violated invariant: fsr_nm > fwhm_nm > 0", ValidationError);
  ResonatorParams q = kDefaults;
  q.charge_offset = 32;
  CHECK_THROWS_AS(q.validate(), ValidationError);
}

TEST_CASE("comb_in_band: ascending wavelengths, one per order, includes published orders") {
  const auto comb = comb_in_band(DriveSetting{}, kDefaults);
  REQUIRE(comb.size() > 10);
  for (std::size_t i = 1; i < comb.size(); ++i) {
    CHECK(comb[i].wavelength_nm > comb[i - 1].wavelength_nm);
    CHECK(comb[i].order == comb[i - 1].order - 1);
  }
  bool saw282 = false, saw311 = false;
  for (const auto& r : comb) {
    saw282 |= r.order == 282;
    saw311 |= r.order == 311;
  }
  CHECK(saw282);
  CHECK(saw311);
}
