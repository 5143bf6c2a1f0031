#pragma once

#include <array>
#include <map>
#include <optional>

#include "oamsim/resonator.hpp"

// Conversion of a resonance-aligned signal photon into an OAM state: routing
// decision, per-charge emission efficiency, mode-purity spectrum over the
// charge basis -6..6 (recorded over masks -7..7), and the circular
// polarization decomposition l = lL - 1 = lR + 1.

namespace oamsim {

inline constexpr int kSpectrumMin = -7;
inline constexpr int kSpectrumMax = 7;
inline constexpr int kBasisMin = -6;
inline constexpr int kBasisMax = 6;
inline constexpr int kSpectrumSize = kSpectrumMax - kSpectrumMin + 1;  // 15 masks

using ChargeSpectrum = std::array<double, kSpectrumSize>;

inline int spectrum_index(int charge) { return charge - kSpectrumMin; }

struct EmitterParams {
  double per_waveguide_coupling = 0.01;
  // emission efficiency by |l|, |l| = 1..6; affine between the published
  // endpoints 1.97% and 0.93%
  std::array<double, 6> efficiency_by_abs_charge = {0.0197, 0.01762, 0.01554,
                                                    0.01346, 0.01138, 0.0093};
  double purity_target = 0.85;
  // optional per-charge spectra replacing the uniform-leakage default
  std::map<int, ChargeSpectrum> spectrum_overrides;

  void validate() const;
};

struct OamPhoton {
  int charge = 0;
  ChargeSpectrum spectrum{};  // nonnegative weights over -7..7, sum 1
  int l_left = 0;             // charge + 1
  int l_right = 0;            // charge - 1
};

// Lookup of the emission efficiency for a charge; |l| must be 1..6.
double emission_efficiency(int charge, const EmitterParams& params);

// purity_target at l, the rest spread uniformly over the other 12 basis
// charges, zero at +-7.
ChargeSpectrum default_spectrum(int charge, const EmitterParams& params);

// spectrum[l] / sum over the basis -6..6 (the +-7 components are excluded
// from the denominator).
double purity_of(const ChargeSpectrum& spectrum, int charge);

// Routing decision: an OamPhoton when the signal wavelength is aligned with
// some resonance (tolerance fwhm/2), otherwise nullopt (photon stays on the
// bus waveguide).
std::optional<OamPhoton> try_emit(double lambda_s_nm, const DriveSetting& drive,
                                  const ResonatorParams& resonator, const EmitterParams& params);

}  // namespace oamsim
