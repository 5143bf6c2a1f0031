#include "oamsim/source.hpp"

#include <cmath>
#include <string>

#include "oamsim/errors.hpp"
#include "oamsim/rng.hpp"

namespace oamsim {

namespace {
constexpr double kRamanOffsetThz = 15.6;
constexpr double kRamanHalfLinewidthThz = 0.0515;  // 103 GHz FWHM / 2
constexpr std::uint32_t kPairStreamTag = 0x50414952;  // "PAIR"
}  // namespace

std::uint64_t PumpConfig::pulse_count() const {
  return static_cast<std::uint64_t>(std::llround(rep_rate_hz * duration_s));
}

void PumpConfig::validate() const {
  if (!(lambda_p_nm > 0.0))
    throw ValidationError("pump: violated invariant: lambda_p_nm > 0");
  if (!(rep_rate_hz > 0.0))
    throw ValidationError("pump: violated invariant: rep_rate_hz > 0");
  if (!(duration_s > 0.0))
    throw ValidationError("pump: violated invariant: duration_s > 0");
}

void PairStatistics::validate(double lambda_p_nm) const {
  if (!(mu >= 0.0)) throw ValidationError("source: violated invariant: mu >= 0");
  if (lambda_s_nm > 0.0 && lambda_i_nm > 0.0) {
    const double residual =
        std::abs(1.0 / lambda_s_nm + 1.0 / lambda_i_nm - 2.0 / lambda_p_nm);
    if (residual >= 1e-9)
      throw ValidationError(
          "source: violated invariant: |1/ls + 1/li - 2/lp| < 1e-9 nm^-1 (got " +
          std::to_string(residual) + ")");
  }
}

double idler_wavelength(double lambda_p_nm, double lambda_s_nm) {
  if (!(lambda_p_nm > 0.0) || !(lambda_s_nm > 0.0))
    throw DomainError("idler_wavelength: wavelengths must be positive");
  const double inv = 2.0 / lambda_p_nm - 1.0 / lambda_s_nm;
  if (!(inv > 0.0))
    throw DomainError("idler_wavelength: 2/lambda_p <= 1/lambda_s leaves no idler energy");
  return 1.0 / inv;
}

bool raman_band_clear(double lambda_p_nm, double lambda_x_nm, double guard_linewidths) {
  if (!(lambda_p_nm > 0.0) || !(lambda_x_nm > 0.0))
    throw DomainError("raman_band_clear: wavelengths must be positive");
  const double offset_thz =
      std::abs(kSpeedOfLightNmThz / lambda_x_nm - kSpeedOfLightNmThz / lambda_p_nm);
  const double guard = guard_linewidths * kRamanHalfLinewidthThz;
  return offset_thz < kRamanOffsetThz - guard || offset_thz > kRamanOffsetThz + guard;
}

PairEventSampler::PairEventSampler(double mu, PairNumberLaw law, std::uint64_t seed)
    : mu_(mu), law_(law), seed_(seed) {
  if (!(mu >= 0.0)) throw DomainError("PairEventSampler: mu must be >= 0");
  // P(no pair): e^-mu for Poisson, 1/(1+mu) for thermal
  log_q_ = (law == PairNumberLaw::poisson) ? -mu : -std::log1p(mu);
}

std::vector<PairEvent> PairEventSampler::block(std::uint64_t begin, std::uint64_t end,
                                               std::uint64_t block_index) const {
  std::vector<PairEvent> out;
  if (mu_ <= 0.0 || begin >= end) return out;
  rng::Xoshiro256pp gen(rng::substream_seed(seed_, kPairStreamTag, block_index));
  rng::EventGapWalker walker(log_q_, begin, end);
  while (auto pulse = walker.next(gen)) {
    const int n = (law_ == PairNumberLaw::poisson) ? rng::zero_truncated_poisson(gen, mu_)
                                                   : rng::zero_truncated_thermal(gen, mu_);
    out.push_back({*pulse, n});
  }
  return out;
}

std::vector<PairEvent> sample_pair_events(const PumpConfig& pump, const PairStatistics& stats,
                                          std::uint64_t seed, std::uint64_t block_size) {
  PairEventSampler sampler(stats.mu, stats.law, seed);
  const std::uint64_t n = pump.pulse_count();
  std::vector<PairEvent> out;
  std::uint64_t block_index = 0;
  for (std::uint64_t begin = 0; begin < n; begin += block_size, ++block_index) {
    auto blk = sampler.block(begin, std::min(begin + block_size, n), block_index);
    out.insert(out.end(), blk.begin(), blk.end());
  }
  return out;
}

}  // namespace oamsim
