#include "oamsim/detection.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "oamsim/errors.hpp"
#include "oamsim/rng.hpp"

namespace oamsim {

namespace {
constexpr std::uint32_t kClickStreamTag = 0x434c4b53;  // "CLKS"
constexpr std::uint32_t kBothStreamTag = 0x424f5448;   // "BOTH"
constexpr std::uint32_t kSigOnlyStreamTag = 0x534f4e4c;
constexpr std::uint32_t kIdlOnlyStreamTag = 0x494f4e4c;
constexpr std::uint32_t kDarkSigStreamTag = 0x4441524b;
constexpr std::uint32_t kDarkIdlStreamTag = 0x4441524c;

void sort_by_time(std::vector<ClickRecord>& v) {
  std::sort(v.begin(), v.end(),
            [](const ClickRecord& a, const ClickRecord& b) { return a.time_ps < b.time_ps; });
}
}  // namespace

double LossBudget::signal_path_db(int charge) const {
  const int a = std::abs(charge);
  if (a < 1 || a > static_cast<int>(signal_path_db_by_abs_charge.size()))
    throw UnknownChargeError("signal_path_db: |l| = " + std::to_string(a) +
                             " outside path table 1..6");
  return signal_path_db_by_abs_charge[static_cast<std::size_t>(a - 1)];
}

void LossBudget::validate() const {
  auto nonneg = [](double v, const char* name) {
    if (!(v >= 0.0))
      throw ValidationError(std::string("loss: violated invariant: ") + name + " >= 0 dB");
  };
  nonneg(coupling_in_db, "coupling_in_db");
  nonneg(sww_db, "sww_db");
  nonneg(idler_arm_db, "idler_arm_db");
  for (double p : signal_path_db_by_abs_charge) nonneg(p, "signal_path_db");
  if (!(objective_coupling > 0.0 && objective_coupling <= 1.0))
    throw ValidationError("loss: violated invariant: objective_coupling in (0,1]");
}

void SpadParams::validate() const {
  if (!(det_efficiency > 0.0 && det_efficiency <= 1.0))
    throw ValidationError("spad: violated invariant: det_efficiency in (0,1]");
  if (!(dark_prob_per_gate >= 0.0 && dark_prob_per_gate < 1.0))
    throw ValidationError("spad: violated invariant: dark_prob_per_gate in [0,1)");
  if (!(jitter_sigma_ps > 0.0))
    throw ValidationError("spad: violated invariant: jitter_sigma_ps > 0");
}

double db_to_fraction(double db) { return std::pow(10.0, -db / 10.0); }

double slm_pass_probability(const OamPhoton& photon, int mask_charge) {
  if (mask_charge < kSpectrumMin || mask_charge > kSpectrumMax)
    throw DomainError("slm_pass_probability: mask charge outside -7..7");
  return photon.spectrum[static_cast<std::size_t>(spectrum_index(mask_charge))];
}

double arm_survival(ArmPath path, int charge, const LossBudget& budget,
                    const EmitterParams& emitter, const SpadParams& spad) {
  const double front = db_to_fraction(budget.coupling_in_db + budget.sww_db);
  if (path == ArmPath::idler_through_bus)
    return db_to_fraction(budget.coupling_in_db + budget.sww_db + budget.idler_arm_db) *
           spad.det_efficiency;
  OamPhoton photon;
  photon.charge = charge;
  photon.spectrum = default_spectrum(charge, emitter);
  return front * emission_efficiency(charge, emitter) * slm_pass_probability(photon, charge) *
         db_to_fraction(budget.signal_path_db(charge)) * budget.objective_coupling *
         spad.det_efficiency;
}

ClickKernel::ClickKernel(double survival_s, double survival_i, const SpadParams& spad_s,
                         const SpadParams& spad_i, double period_ps, std::uint64_t seed)
    : survival_s_(survival_s),
      survival_i_(survival_i),
      spad_s_(spad_s),
      spad_i_(spad_i),
      period_ps_(period_ps),
      seed_(seed) {
  if (!(survival_s >= 0.0 && survival_s <= 1.0) || !(survival_i >= 0.0 && survival_i <= 1.0))
    throw DomainError("ClickKernel: survivals must be in [0,1]");
}

void ClickKernel::clicks_from_pairs(const std::vector<PairEvent>& events,
                                    std::uint64_t block_index, ClickStreams& out) const {
  rng::Xoshiro256pp gen(rng::substream_seed(seed_, kClickStreamTag, block_index));
  for (const PairEvent& ev : events) {
    const double center = pulse_center_ps(ev.pulse_index);
    for (int k = 0; k < ev.n_pairs; ++k) {
      if (gen.bernoulli(survival_s_))
        out.signal.push_back({center + spad_s_.jitter_sigma_ps * gen.normal(),
                              ClickRecord::Arm::signal, ClickRecord::Origin::pair});
      if (gen.bernoulli(survival_i_))
        out.idler.push_back({center + spad_i_.jitter_sigma_ps * gen.normal(),
                             ClickRecord::Arm::idler, ClickRecord::Origin::pair});
    }
  }
}

std::uint64_t ClickKernel::clicks_decomposed(double mu, std::uint64_t begin, std::uint64_t end,
                                             std::uint64_t block_index, ClickStreams& out) const {
  // Poisson(mu) pairs thinned per arm split into three independent Poisson
  // click processes: both-click, signal-only, idler-only.
  const double mu_both = mu * survival_s_ * survival_i_;
  const double mu_sig = mu * survival_s_ - mu_both;
  const double mu_idl = mu * survival_i_ - mu_both;

  std::vector<std::uint64_t> pulses;
  auto walk = [&](double rate, std::uint32_t tag, bool sig, bool idl) {
    if (rate <= 0.0) return;
    rng::Xoshiro256pp gen(rng::substream_seed(seed_, tag, block_index));
    rng::EventGapWalker walker(-rate, begin, end);
    while (auto pulse = walker.next(gen)) {
      const int n = rng::zero_truncated_poisson(gen, rate);
      const double center = pulse_center_ps(*pulse);
      for (int k = 0; k < n; ++k) {
        if (sig)
          out.signal.push_back({center + spad_s_.jitter_sigma_ps * gen.normal(),
                                ClickRecord::Arm::signal, ClickRecord::Origin::pair});
        if (idl)
          out.idler.push_back({center + spad_i_.jitter_sigma_ps * gen.normal(),
                               ClickRecord::Arm::idler, ClickRecord::Origin::pair});
      }
      pulses.push_back(*pulse);
    }
  };
  walk(mu_both, kBothStreamTag, true, true);
  walk(mu_sig, kSigOnlyStreamTag, true, false);
  walk(mu_idl, kIdlOnlyStreamTag, false, true);

  std::sort(pulses.begin(), pulses.end());
  return static_cast<std::uint64_t>(
      std::unique(pulses.begin(), pulses.end()) - pulses.begin());
}

void ClickKernel::dark_clicks(std::uint64_t begin, std::uint64_t end, std::uint64_t block_index,
                              ClickStreams& out) const {
  auto walk = [&](double prob, std::uint32_t tag, std::vector<ClickRecord>& arm_out,
                  ClickRecord::Arm arm) {
    if (prob <= 0.0) return;
    rng::Xoshiro256pp gen(rng::substream_seed(seed_, tag, block_index));
    rng::EventGapWalker walker(std::log1p(-prob), begin, end);
    while (auto pulse = walker.next(gen)) {
      const double t = (static_cast<double>(*pulse) + gen.uniform()) * period_ps_;
      arm_out.push_back({t, arm, ClickRecord::Origin::dark});
    }
  };
  walk(spad_s_.dark_prob_per_gate, kDarkSigStreamTag, out.signal, ClickRecord::Arm::signal);
  walk(spad_i_.dark_prob_per_gate, kDarkIdlStreamTag, out.idler, ClickRecord::Arm::idler);
}

ClickStreams generate_clicks(const std::vector<PairEvent>& pair_events, double survival_s,
                             double survival_i, const PumpConfig& pump, const SpadParams& spad_s,
                             const SpadParams& spad_i, std::uint64_t seed) {
  ClickKernel kernel(survival_s, survival_i, spad_s, spad_i, pump.period_ps(), seed);
  ClickStreams out;
  kernel.clicks_from_pairs(pair_events, 0, out);
  kernel.dark_clicks(0, pump.pulse_count(), 0, out);
  sort_by_time(out.signal);
  sort_by_time(out.idler);
  return out;
}

}  // namespace oamsim
