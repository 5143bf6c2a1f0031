#include "oamsim/emitter.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "oamsim/errors.hpp"

namespace oamsim {

void EmitterParams::validate() const {
  if (!(per_waveguide_coupling > 0.0 && per_waveguide_coupling < 1.0))
    throw ValidationError("emitter: violated invariant: per_waveguide_coupling in (0,1)");
  if (!(purity_target > 0.0 && purity_target <= 1.0))
    throw ValidationError("emitter: violated invariant: purity_target in (0,1]");
  for (std::size_t i = 0; i < efficiency_by_abs_charge.size(); ++i) {
    const double e = efficiency_by_abs_charge[i];
    if (!(e > 0.0 && e < 1.0))
      throw ValidationError("emitter: violated invariant: efficiency values in (0,1)");
    if (i > 0 && e > efficiency_by_abs_charge[i - 1])
      throw ValidationError(
          "emitter: violated invariant: efficiency_table non-increasing in |l|");
  }
  for (const auto& [charge, spectrum] : spectrum_overrides) {
    if (charge < kBasisMin || charge > kBasisMax)
      throw ValidationError("emitter: violated invariant: spectrum override charge in -6..6");
    double sum = 0.0;
    for (double w : spectrum) {
      if (!(w >= 0.0))
        throw ValidationError("emitter: violated invariant: spectrum weights >= 0");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw ValidationError("emitter: violated invariant: spectrum sums to 1 (tolerance 1e-12)");
  }
}

double emission_efficiency(int charge, const EmitterParams& params) {
  const int a = std::abs(charge);
  if (a < 1 || a > static_cast<int>(params.efficiency_by_abs_charge.size()))
    throw UnknownChargeError("emission_efficiency: |l| = " + std::to_string(a) +
                             " outside efficiency table 1..6");
  return params.efficiency_by_abs_charge[static_cast<std::size_t>(a - 1)];
}

ChargeSpectrum default_spectrum(int charge, const EmitterParams& params) {
  if (charge < kBasisMin || charge > kBasisMax)
    throw UnknownChargeError("default_spectrum: charge " + std::to_string(charge) +
                             " outside basis -6..6");
  if (auto it = params.spectrum_overrides.find(charge); it != params.spectrum_overrides.end())
    return it->second;
  ChargeSpectrum s{};
  const int basis_size = kBasisMax - kBasisMin + 1;  // 13
  const double leak = (1.0 - params.purity_target) / (basis_size - 1);
  for (int m = kBasisMin; m <= kBasisMax; ++m)
    s[static_cast<std::size_t>(spectrum_index(m))] = (m == charge) ? params.purity_target : leak;
  return s;
}

double purity_of(const ChargeSpectrum& spectrum, int charge) {
  if (charge < kSpectrumMin || charge > kSpectrumMax)
    throw UnknownChargeError("purity_of: charge outside spectrum support -7..7");
  double basis_mass = 0.0;
  for (int m = kBasisMin; m <= kBasisMax; ++m)
    basis_mass += spectrum[static_cast<std::size_t>(spectrum_index(m))];
  if (basis_mass <= 0.0)
    throw DomainError("purity_of: basis -6..6 carries zero mass");
  return spectrum[static_cast<std::size_t>(spectrum_index(charge))] / basis_mass;
}

std::optional<OamPhoton> try_emit(double lambda_s_nm, const DriveSetting& drive,
                                  const ResonatorParams& resonator, const EmitterParams& params) {
  const auto order = aligned_order(lambda_s_nm, drive, resonator, 0.5 * resonator.fwhm_nm);
  if (!order) return std::nullopt;
  const int charge = charge_of_order(*order, resonator);
  if (charge < kBasisMin || charge > kBasisMax)
    throw UnknownChargeError("try_emit: aligned order " + std::to_string(*order) +
                             " maps to charge " + std::to_string(charge) +
                             " outside the emitter basis -6..6");
  OamPhoton photon;
  photon.charge = charge;
  photon.spectrum = default_spectrum(charge, params);
  photon.l_left = charge + 1;
  photon.l_right = charge - 1;
  return photon;
}

}  // namespace oamsim
