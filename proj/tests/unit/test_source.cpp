#include "oamsim/source.hpp"

#include <cmath>
#include <map>

#include "doctest.h"
#include "oamsim/errors.hpp"

using namespace oamsim;

TEST_CASE("idler_wavelength: published pair and degenerate case") {
  const double li = idler_wavelength(1552.5, 1547.72);
  CHECK(std::abs(li - 1557.32) <= 0.02);  // paper rounds to 1557.32
  const double ls = idler_wavelength(1552.5, 1557.32);
  CHECK(std::abs(ls - 1547.72) <= 0.02);  // signal and idler exchanged
  CHECK(idler_wavelength(1552.5, 1552.5) == doctest::Approx(1552.5).epsilon(1e-15));
}

TEST_CASE("idler_wavelength: exact involution in inverse-wavelength space") {
  for (double ls : {1530.0, 1547.72, 1552.5, 1557.32, 1580.0}) {
    const double li = idler_wavelength(1552.5, ls);
    CHECK(std::abs(1.0 / ls + 1.0 / li - 2.0 / 1552.5) < 1e-9);
    const double back = idler_wavelength(1552.5, li);
    CHECK(std::abs(1.0 / back - 1.0 / ls) < 1e-9);
  }
}

TEST_CASE("idler_wavelength: domain error when no idler energy remains") {
  CHECK_THROWS_AS(idler_wavelength(1552.5, 700.0), DomainError);
  CHECK_THROWS_AS(idler_wavelength(1552.5, 776.25), DomainError);  // exactly 2/lp = 1/ls
}

TEST_CASE("raman_band_clear: pump, published signal, and the band itself") {
  CHECK(raman_band_clear(1552.5, 1552.5));  // zero offset
  // independent arithmetic: f = c/lambda, offset ~ 0.596 THz, far from 15.6
  const double offset_thz = 299792.458 / 1547.72 - 299792.458 / 1552.5;
  CHECK(offset_thz == doctest::Approx(0.596).epsilon(1e-2));
  CHECK(raman_band_clear(1552.5, 1547.72));
  CHECK(raman_band_clear(1552.5, 1557.32));

  // a wavelength exactly 15.6 THz below the pump sits in the band
  const double f_p = 299792.458 / 1552.5;
  const double lambda_raman = 299792.458 / (f_p - 15.6);
  CHECK_FALSE(raman_band_clear(1552.5, lambda_raman));
  // guard window edges: 3 half-linewidths = 0.1545 THz
  const double lambda_edge_in = 299792.458 / (f_p - 15.6 - 0.9 * 3 * 0.0515);
  const double lambda_edge_out = 299792.458 / (f_p - 15.6 - 1.1 * 3 * 0.0515);
  CHECK_FALSE(raman_band_clear(1552.5, lambda_edge_in));
  CHECK(raman_band_clear(1552.5, lambda_edge_out));
}

TEST_CASE("pair statistics invariant: energy-conservation residual") {
  PairStatistics stats;
  stats.mu = 1e-3;
  stats.lambda_s_nm = 1547.72;
  stats.lambda_i_nm = idler_wavelength(1552.5, 1547.72);
  CHECK_NOTHROW(stats.validate(1552.5));
  stats.lambda_i_nm += 0.01;
  CHECK_THROWS_AS(stats.validate(1552.5), ValidationError);
}

TEST_CASE("sample_pair_events: mu = 0 yields an empty stream") {
  PumpConfig pump;
  pump.duration_s = 1.0;
  PairStatistics stats;
  stats.mu = 0.0;
  CHECK(sample_pair_events(pump, stats, 42).empty());
}

TEST_CASE("sample_pair_events: sample mean within 3 standard errors of mu") {
  PumpConfig pump;
  pump.duration_s = 0.25;  // 1e7 pulses
  PairStatistics stats;
  stats.mu = 1e-3;
  const auto events = sample_pair_events(pump, stats, 2024);
  double pairs = 0;
  for (const auto& e : events) pairs += e.n_pairs;
  const double n = static_cast<double>(pump.pulse_count());
  const double mean = pairs / n;
  const double se = std::sqrt(stats.mu / n);
  CHECK(std::abs(mean - stats.mu) <= 3.0 * se);
}

TEST_CASE("sample_pair_events: emitting-pulse count matches Binomial(N, 1 - e^-mu)") {
  PumpConfig pump;
  pump.duration_s = 0.25;
  PairStatistics stats;
  stats.mu = 2e-3;
  const auto events = sample_pair_events(pump, stats, 7);
  const double n = static_cast<double>(pump.pulse_count());
  const double p = -std::expm1(-stats.mu);
  const double sigma = std::sqrt(n * p * (1.0 - p));
  CHECK(std::abs(static_cast<double>(events.size()) - n * p) <= 3.0 * sigma);
  // thinning: every event carries at least one pair, indices ascend
  for (std::size_t i = 0; i < events.size(); ++i) {
    CHECK(events[i].n_pairs >= 1);
    if (i) CHECK(events[i].pulse_index > events[i - 1].pulse_index);
    CHECK(events[i].pulse_index < pump.pulse_count());
  }
}

TEST_CASE("sample_pair_events: multi-pair fraction approaches mu/2") {
  PumpConfig pump;
  pump.duration_s = 0.25;
  PairStatistics stats;
  stats.mu = 0.02;  // P(n>=2 | n>=1) ~ mu/2 for small mu
  const auto events = sample_pair_events(pump, stats, 99);
  std::uint64_t multi = 0;
  for (const auto& e : events)
    if (e.n_pairs >= 2) ++multi;
  const double frac = static_cast<double>(multi) / static_cast<double>(events.size());
  const double expect = stats.mu / 2.0;
  const double sigma = std::sqrt(expect / static_cast<double>(events.size()));
  CHECK(std::abs(frac - expect) <= 3.0 * sigma + 1e-4);
}

TEST_CASE("sample_pair_events: deterministic given seed and partition") {
  PumpConfig pump;
  pump.duration_s = 0.02;
  PairStatistics stats;
  stats.mu = 5e-3;
  const auto a = sample_pair_events(pump, stats, 1234, 1 << 16);
  const auto b = sample_pair_events(pump, stats, 1234, 1 << 16);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].pulse_index == b[i].pulse_index);
    CHECK(a[i].n_pairs == b[i].n_pairs);
  }
  const auto c = sample_pair_events(pump, stats, 1235, 1 << 16);
  CHECK(a.size() != c.size());  // different seed, different stream
}

TEST_CASE("thermal pair law: mean preserved, heavier multi-pair tail") {
  PumpConfig pump;
  pump.duration_s = 0.25;
  PairStatistics stats;
  stats.mu = 0.02;
  stats.law = PairNumberLaw::thermal;
  const auto events = sample_pair_events(pump, stats, 11);
  double pairs = 0;
  std::uint64_t multi = 0;
  for (const auto& e : events) {
    pairs += e.n_pairs;
    if (e.n_pairs >= 2) ++multi;
  }
  const double n = static_cast<double>(pump.pulse_count());
  CHECK(std::abs(pairs / n - stats.mu) <= 3.0 * std::sqrt(stats.mu / n) + 1e-4);
  // P(n>=2 | n>=1) = mu/(1+mu), about twice the Poisson ratio
  const double frac = static_cast<double>(multi) / static_cast<double>(events.size());
  const double expect = stats.mu / (1.0 + stats.mu);
  CHECK(std::abs(frac - expect) <= 3.0 * std::sqrt(expect / static_cast<double>(events.size())));
}

TEST_CASE("pump config: pulse count rounds rep_rate * duration") {
  PumpConfig pump;
  CHECK(pump.pulse_count() == 24000000000ULL);  // 40 MHz * 600 s
  pump.duration_s = 0.1;
  CHECK(pump.pulse_count() == 4000000ULL);
  CHECK(pump.period_ps() == doctest::Approx(25000.0));
}
