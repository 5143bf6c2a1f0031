#pragma once

#include <optional>
#include <vector>

// Micro-ring model: a comb of Lorentzian transmission dips spaced by the FSR,
// red-shifted linearly with heater power, plus the mapping from whispering
// gallery mode order to the emitted OAM topological charge.

namespace oamsim {

struct ResonatorParams {
  double fsr_nm = 0.5;
  double fwhm_nm = 0.045;
  double lambda_ref_nm = 1557.27;  // zero-drive wavelength of the reference order
  int order_ref = 282;
  double dip_depth = 0.4;                 // on-resonance extinction in (0,1]
  double thermo_slope_nm_per_mw = 0.05;   // red shift per unit heater power
  double heater_ohms = 9.293376190476595; // calibrated from the 13.97 V anchor
  int n_waveguides = 32;
  int charge_offset = 24;
  // comb orders are enumerated only inside this band (zero-drive wavelengths)
  double band_min_nm = 1540.0;
  double band_max_nm = 1565.0;

  void validate() const;
};

struct DriveSetting {
  double voltage_v = 0.0;
  double power_mw = 0.0;  // always voltage_v^2 / heater_ohms
};

struct Resonance {
  int order = 0;
  double wavelength_nm = 0.0;
};

DriveSetting drive_for_power(double power_mw, const ResonatorParams& params);
DriveSetting drive_for_voltage(double voltage_v, const ResonatorParams& params);

double resonance_wavelength(int order, const DriveSetting& drive, const ResonatorParams& params);

// 1 - dip_depth * sum of the Lorentzian comb, clamped to [0,1]. The comb sum
// is evaluated in closed form over all orders, which keeps it exactly
// periodic and symmetric about every resonance.
double transmission(double lambda_nm, const DriveSetting& drive, const ResonatorParams& params);

// The unique order whose resonance lies within tol_nm of lambda, if any.
// Throws AmbiguousAlignmentError when tol admits two orders (tol >= fsr/2).
std::optional<int> aligned_order(double lambda_nm, const DriveSetting& drive,
                                 const ResonatorParams& params, double tol_nm);

// Topological charge of a WGM order: fold'((order - charge_offset) mod N)
// into (-N/2, N/2].
int charge_of_order(int order, const ResonatorParams& params);

// Minimal heater power aligning some order of the given charge with the
// target wavelength (red shift only). Throws UnreachableChargeError when no
// order of that charge inside the modeled band can reach the target.
double required_power_mw(int charge, double lambda_target_nm, const ResonatorParams& params);

// All comb resonances whose zero-drive wavelength falls inside the band,
// evaluated at the given drive, ascending in wavelength.
std::vector<Resonance> comb_in_band(const DriveSetting& drive, const ResonatorParams& params);

}  // namespace oamsim
