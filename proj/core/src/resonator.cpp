#include "oamsim/resonator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "oamsim/errors.hpp"

namespace oamsim {

namespace {
constexpr double kPi = 3.14159265358979323846;

void require(bool ok, const std::string& invariant) {
  if (!ok) throw ValidationError("resonator: violated invariant: " + invariant);
}
}  // namespace

void ResonatorParams::validate() const {
  require(fsr_nm > fwhm_nm && fwhm_nm > 0.0, "fsr_nm > fwhm_nm > 0");
  require(thermo_slope_nm_per_mw > 0.0, "thermo_slope_nm_per_mw > 0");
  require(heater_ohms > 0.0, "heater_ohms > 0");
  require(dip_depth > 0.0 && dip_depth <= 1.0, "dip_depth in (0,1]");
  require(n_waveguides == 32, "n_waveguides = 32");
  require(charge_offset >= 0 && charge_offset < n_waveguides,
          "charge_offset in [0, n_waveguides)");
  require(band_min_nm < band_max_nm, "band_min_nm < band_max_nm");
  require(lambda_ref_nm >= band_min_nm && lambda_ref_nm <= band_max_nm,
          "lambda_ref_nm inside [band_min_nm, band_max_nm]");
}

DriveSetting drive_for_power(double power_mw, const ResonatorParams& params) {
  if (!(power_mw >= 0.0)) throw DomainError("drive_for_power: power must be >= 0");
  return DriveSetting{std::sqrt(power_mw * params.heater_ohms), power_mw};
}

DriveSetting drive_for_voltage(double voltage_v, const ResonatorParams& params) {
  if (!(voltage_v >= 0.0)) throw DomainError("drive_for_voltage: voltage must be >= 0");
  return DriveSetting{voltage_v, voltage_v * voltage_v / params.heater_ohms};
}

double resonance_wavelength(int order, const DriveSetting& drive, const ResonatorParams& params) {
  return params.lambda_ref_nm - (order - params.order_ref) * params.fsr_nm +
         params.thermo_slope_nm_per_mw * drive.power_mw;
}

double transmission(double lambda_nm, const DriveSetting& drive, const ResonatorParams& params) {
  // sum_{p in Z} L(delta - p*FSR) for a Lorentzian of HWHM h has the closed
  // form (pi*h/F) * sinh(2*pi*h/F) / (cosh(2*pi*h/F) - cos(2*pi*delta/F)).
  const double h = 0.5 * params.fwhm_nm;
  const double f = params.fsr_nm;
  const double delta = lambda_nm - resonance_wavelength(params.order_ref, drive, params);
  const double x = 2.0 * kPi * h / f;
  const double comb = (kPi * h / f) * std::sinh(x) / (std::cosh(x) - std::cos(2.0 * kPi * delta / f));
  return std::clamp(1.0 - params.dip_depth * comb, 0.0, 1.0);
}

std::optional<int> aligned_order(double lambda_nm, const DriveSetting& drive,
                                 const ResonatorParams& params, double tol_nm) {
  if (!(tol_nm > 0.0)) throw DomainError("aligned_order: tol_nm must be > 0");
  // nearest order: lambda = lambda_ref - (p - ref)*fsr + slope*P
  const double p_exact = params.order_ref +
                         (params.lambda_ref_nm + params.thermo_slope_nm_per_mw * drive.power_mw -
                          lambda_nm) / params.fsr_nm;
  const int p = static_cast<int>(std::lround(p_exact));
  const double d0 = std::abs(resonance_wavelength(p, drive, params) - lambda_nm);
  if (tol_nm >= 0.5 * params.fsr_nm) {
    const int p2 = (p_exact > p) ? p + 1 : p - 1;
    const double d1 = std::abs(resonance_wavelength(p2, drive, params) - lambda_nm);
    if (d0 <= tol_nm && d1 <= tol_nm)
      throw AmbiguousAlignmentError("aligned_order: two orders within tolerance " +
                                    std::to_string(tol_nm) + " nm");
  }
  if (d0 <= tol_nm) return p;
  return std::nullopt;
}

int charge_of_order(int order, const ResonatorParams& params) {
  const int n = params.n_waveguides;
  int r = (order - params.charge_offset) % n;
  if (r < 0) r += n;
  if (r > n / 2) r -= n;  // fold into (-n/2, n/2]
  return r;
}

namespace {
// zero-drive order range whose resonances lie inside the band
std::pair<int, int> band_orders(const ResonatorParams& params) {
  // lambda(p,0) in [min,max]  <=>  p in [ref + (ref_nm - max)/fsr, ref + (ref_nm - min)/fsr]
  const int lo = static_cast<int>(std::ceil(
      params.order_ref + (params.lambda_ref_nm - params.band_max_nm) / params.fsr_nm));
  const int hi = static_cast<int>(std::floor(
      params.order_ref + (params.lambda_ref_nm - params.band_min_nm) / params.fsr_nm));
  return {lo, hi};
}
}  // namespace

double required_power_mw(int charge, double lambda_target_nm, const ResonatorParams& params) {
  const auto [lo, hi] = band_orders(params);
  const DriveSetting zero{};
  // smallest eligible order is the one needing the least power: power grows
  // with p at fixed target, so scan upward
  for (int p = lo; p <= hi; ++p) {
    if (charge_of_order(p, params) != charge) continue;
    const double lambda0 = resonance_wavelength(p, zero, params);
    if (lambda0 <= lambda_target_nm)
      return (lambda_target_nm - lambda0) / params.thermo_slope_nm_per_mw;
  }
  throw UnreachableChargeError("required_power: no order of charge " + std::to_string(charge) +
                               " in band [" + std::to_string(params.band_min_nm) + ", " +
                               std::to_string(params.band_max_nm) + "] nm can red-shift to " +
                               std::to_string(lambda_target_nm) + " nm");
}

std::vector<Resonance> comb_in_band(const DriveSetting& drive, const ResonatorParams& params) {
  const auto [lo, hi] = band_orders(params);
  std::vector<Resonance> out;
  out.reserve(static_cast<std::size_t>(std::max(0, hi - lo + 1)));
  for (int p = hi; p >= lo; --p)  // descending order = ascending wavelength
    out.push_back({p, resonance_wavelength(p, drive, params)});
  return out;
}

}  // namespace oamsim
