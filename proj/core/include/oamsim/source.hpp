#pragma once

#include <cstdint>
#include <functional>
#include <vector>

// Pulsed-pump SFWM pair generation in the silicon wire waveguide: spectral
// arithmetic (energy conservation, Raman-band clearance) and thinned
// per-pulse pair sampling.

namespace oamsim {

// speed of light in nm*THz (f[THz] = c / lambda[nm])
inline constexpr double kSpeedOfLightNmThz = 299792.458;

struct PumpConfig {
  double lambda_p_nm = 1552.5;
  double rep_rate_hz = 4.0e7;
  double duration_s = 600.0;

  std::uint64_t pulse_count() const;
  double period_ps() const { return 1.0e12 / rep_rate_hz; }
  void validate() const;
};

enum class PairNumberLaw { poisson, thermal };

struct PairStatistics {
  double mu = 0.0;  // mean pairs per pulse
  double lambda_s_nm = 0.0;
  double lambda_i_nm = 0.0;
  PairNumberLaw law = PairNumberLaw::poisson;

  void validate(double lambda_p_nm) const;
};

struct PairEvent {
  std::uint64_t pulse_index = 0;
  int n_pairs = 1;
};

// 1/result = 2/lambda_p - 1/lambda_s (signal and idler exchange symmetric).
double idler_wavelength(double lambda_p_nm, double lambda_s_nm);

// True iff |f(lambda_x) - f(lambda_p)| is outside the silicon Raman band
// 15.6 THz +- guard_linewidths * (103 GHz / 2).
bool raman_band_clear(double lambda_p_nm, double lambda_x_nm, double guard_linewidths = 3.0);

// Thinned sampler: only pulses with n_pairs >= 1 are visited. Randomness is
// derived from (seed, block index), so any block partition replays exactly.
class PairEventSampler {
 public:
  PairEventSampler(double mu, PairNumberLaw law, std::uint64_t seed);

  // events for pulses in [begin, end), ascending pulse index
  std::vector<PairEvent> block(std::uint64_t begin, std::uint64_t end,
                               std::uint64_t block_index) const;

 private:
  double mu_;
  double log_q_;  // log P(no pair in a pulse)
  PairNumberLaw law_;
  std::uint64_t seed_;
};

// Convenience whole-run form used by tests and small studies; visits blocks
// of block_size pulses in order.
std::vector<PairEvent> sample_pair_events(const PumpConfig& pump, const PairStatistics& stats,
                                          std::uint64_t seed,
                                          std::uint64_t block_size = (1ULL << 22));

}  // namespace oamsim
