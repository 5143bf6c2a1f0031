#include "oamsim/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <future>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "oamsim/errors.hpp"

namespace oamsim {

using ordered_json = nlohmann::ordered_json;

const char* to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::sww_only: return "sww_only";
    case ScenarioKind::oam_run: return "oam_run";
    case ScenarioKind::spectrum_sweep: return "spectrum_sweep";
    case ScenarioKind::tomography: return "tomography";
    case ScenarioKind::calibrate: return "calibrate";
  }
  return "unknown";
}

void Scenario::validate() const {
  if (kind == ScenarioKind::oam_run || kind == ScenarioKind::tomography) {
    if (!charge)
      throw ValidationError(std::string("scenario: ") + to_string(kind) + " requires a charge");
    const int l = *charge;
    const bool ok = (l >= 2 && l <= 6) || (l >= -6 && l <= -1);
    if (!ok)
      throw ValidationError("scenario: violated invariant: charge in {2..6} u {-6..-1}, got " +
                            std::to_string(l));
  }
  if (kind == ScenarioKind::spectrum_sweep) {
    if (!(sweep.step_nm > 0.0) || !(sweep.to_nm > sweep.from_nm))
      throw ValidationError("scenario: sweep needs to_nm > from_nm and step_nm > 0");
    if (!(sweep.power_mw >= 0.0))
      throw ValidationError("scenario: sweep power_mw must be >= 0");
  }
  if (workers < 0) throw ValidationError("scenario: workers must be >= 0");
}

// ---------------------------------------------------------------------------
// engine

namespace {

struct BlockResult {
  ClickStreams clicks;
  std::uint64_t emitting = 0;
  double end_ps = 0.0;
};

BlockResult make_block(const EngineSettings& s, std::uint64_t block_index) {
  const std::uint64_t begin = block_index * s.block_size;
  const std::uint64_t end = std::min(begin + s.block_size, s.n_pulses);
  ClickKernel kernel(s.survival_s, s.survival_i, s.spad_s, s.spad_i, s.period_ps, s.seed);
  BlockResult out;
  if (s.mu > 0.0) {
    if (s.law == PairNumberLaw::poisson) {
      out.emitting = kernel.clicks_decomposed(s.mu, begin, end, block_index, out.clicks);
    } else {
      PairEventSampler sampler(s.mu, s.law, s.seed);
      const auto events = sampler.block(begin, end, block_index);
      kernel.clicks_from_pairs(events, block_index, out.clicks);
      out.emitting = events.size();
    }
  }
  kernel.dark_clicks(begin, end, block_index, out.clicks);
  auto by_time = [](const ClickRecord& a, const ClickRecord& b) { return a.time_ps < b.time_ps; };
  std::sort(out.clicks.signal.begin(), out.clicks.signal.end(), by_time);
  std::sort(out.clicks.idler.begin(), out.clicks.idler.end(), by_time);
  out.end_ps = static_cast<double>(end) * s.period_ps;
  return out;
}

}  // namespace

EngineOutcome run_engine(const EngineSettings& s) {
  if (s.n_pulses == 0) throw DomainError("engine: n_pulses must be > 0");
  const std::uint64_t blocks = (s.n_pulses + s.block_size - 1) / s.block_size;
  if (blocks > 1 && static_cast<double>(s.block_size) * s.period_ps < s.span_ps)
    throw ValidationError("engine: block_size shorter than the analysis span");

  unsigned workers = s.workers > 0 ? static_cast<unsigned>(s.workers)
                                   : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, blocks));

  HistogramBuilder builder(s.bin_width_ps, s.span_ps);
  EngineOutcome out;

  auto reduce = [&](BlockResult&& block) {
    builder.feed(block.clicks.signal, block.clicks.idler, block.end_ps);
    out.emitting_pulses += block.emitting;
    out.signal_clicks += block.clicks.signal.size();
    out.idler_clicks += block.clicks.idler.size();
    if (s.tap) s.tap(block.clicks);
  };

  if (workers <= 1) {
    for (std::uint64_t b = 0; b < blocks; ++b) reduce(make_block(s, b));
  } else {
    // dispatch in rounds; reduce strictly in block order
    std::vector<std::future<BlockResult>> round;
    for (std::uint64_t b0 = 0; b0 < blocks; b0 += workers) {
      const std::uint64_t n = std::min<std::uint64_t>(workers, blocks - b0);
      round.clear();
      for (std::uint64_t k = 0; k < n; ++k)
        round.push_back(std::async(std::launch::async, make_block, std::cref(s), b0 + k));
      for (auto& f : round) reduce(f.get());
    }
  }
  out.histogram = builder.take();
  return out;
}

// ---------------------------------------------------------------------------
// calibration

CalibrationPatch calibrate(const CalibrationTargets& targets, const ExperimentConfig& cfg) {
  targets.validate();
  const double n = static_cast<double>(cfg.pump.pulse_count());
  const double s_s = arm_survival(ArmPath::idler_through_bus, 0, cfg.loss, cfg.emitter,
                                  cfg.spad_signal);
  const double s_i = arm_survival(ArmPath::idler_through_bus, 0, cfg.loss, cfg.emitter,
                                  cfg.spad_idler);
  const WindowModel wm = WindowModel::for_windows(cfg.analysis.window_ps, cfg.pump.period_ps(),
                                                  cfg.spad_signal.jitter_sigma_ps,
                                                  cfg.spad_idler.jitter_sigma_ps);

  const double acc_target = targets.cc / targets.car_mid();
  const double pair_mass = (targets.cc - acc_target) / (n * wm.pair_capture);  // mu*ss*si
  if (!(pair_mass > 0.0))
    throw InfeasibleCalibrationError("calibrate: CC target does not exceed the accidental target");
  const double mu = pair_mass / (s_s * s_i);
  if (!(mu < 1.0))
    throw InfeasibleCalibrationError(
        "calibrate: implied mean pairs per pulse >= 1; loss budget too lossy for the CC target");

  const double photon_acc = n * wm.pair_capture * mu * mu * s_s * s_i;
  const double dark_budget = acc_target - photon_acc;
  if (dark_budget < -1e-6 * acc_target)
    throw InfeasibleCalibrationError(
        "calibrate: accidentals target sits below the photon-limited floor (target mean CAR " +
        std::to_string(targets.car_mid()) + " > attainable " + std::to_string(1.0 + 1.0 / mu) +
        "); no nonnegative dark rate fits");
  double dark = 0.0;
  if (dark_budget > 0.0) {
    // n*w*(d^2 + mu*(ss+si)*d) = dark_budget, d >= 0
    const double c = dark_budget / (n * wm.uniform_fraction);
    const double b = mu * (s_s + s_i);
    dark = 0.5 * (-b + std::sqrt(b * b + 4.0 * c));
  }

  CalibrationPatch patch;
  patch.mu = mu;
  patch.dark_s = patch.dark_i = dark;
  const double anchor_power =
      required_power_mw(targets.anchor_charge, targets.anchor_lambda_nm, cfg.resonator);
  if (!(anchor_power > 0.0))
    throw InfeasibleCalibrationError("calibrate: voltage anchor requires zero heater power");
  patch.heater_ohms = targets.anchor_voltage_v * targets.anchor_voltage_v / anchor_power;

  const ExpectedCounts check = expected_counts(mu, s_s, s_i, dark, dark, n, wm);
  patch.cc_residual = check.cc - targets.cc;
  patch.car_residual = check.cc / check.acc - targets.car_mid();
  return patch;
}

double pre_detection_cc_estimate(const ExperimentConfig& cfg, int charge, double n_pulses) {
  const double survival_s = arm_survival(ArmPath::signal_through_emitter, charge, cfg.loss,
                                         cfg.emitter, cfg.spad_signal);
  const double survival_i =
      arm_survival(ArmPath::idler_through_bus, charge, cfg.loss, cfg.emitter, cfg.spad_idler);
  const double pre_signal = survival_s / db_to_fraction(cfg.loss.signal_path_db(charge));
  return n_pulses * cfg.source.mu * pre_signal * survival_i;
}

// ---------------------------------------------------------------------------
// scenarios

namespace {

void add_oracle_warnings(const ExperimentConfig& cfg, double survival_s, double survival_i,
                         std::vector<std::string>& warnings) {
  const double worst = cfg.source.mu * std::max(survival_s, survival_i);
  if (worst >= 0.01) {
    std::ostringstream os;
    os << "mu*survival = " << worst
       << " exceeds 0.01; first-order coincidence oracle degrades";
    warnings.push_back(os.str());
  }
}

CoincidenceOutcome run_coincidence(const Scenario& sc, const ExperimentConfig& cfg,
                                   double survival_s, double survival_i, std::uint64_t n_pulses,
                                   RunReport& report) {
  EngineSettings es;
  es.n_pulses = n_pulses;
  es.period_ps = cfg.pump.period_ps();
  es.mu = cfg.source.mu;
  es.law = cfg.source.law;
  es.survival_s = survival_s;
  es.survival_i = survival_i;
  es.spad_s = cfg.spad_signal;
  es.spad_i = cfg.spad_idler;
  es.seed = sc.seed;
  es.block_size = cfg.run.block_size;
  es.workers = sc.workers;
  es.bin_width_ps = cfg.analysis.bin_width_ps;
  es.span_ps = cfg.analysis.span_ps;
  es.tap = sc.click_tap;

  EngineOutcome eo = run_engine(es);
  report.emitting_pulses = eo.emitting_pulses;

  CoincidenceOutcome co;
  co.cc = extract_cc(eo.histogram, cfg.analysis.window_ps);
  co.acc = extract_acc(eo.histogram, cfg.analysis.window_ps, cfg.pump.period_ps() / 1e3,
                       cfg.analysis.acc_side_peaks);
  co.car = car_stats(co.cc, co.acc);
  const WindowModel wm = WindowModel::for_windows(cfg.analysis.window_ps, cfg.pump.period_ps(),
                                                  cfg.spad_signal.jitter_sigma_ps,
                                                  cfg.spad_idler.jitter_sigma_ps);
  co.expected = expected_counts(cfg.source.mu, survival_s, survival_i,
                                cfg.spad_signal.dark_prob_per_gate,
                                cfg.spad_idler.dark_prob_per_gate,
                                static_cast<double>(n_pulses), wm);
  co.signal_clicks = eo.signal_clicks;
  co.idler_clicks = eo.idler_clicks;
  co.histogram = std::move(eo.histogram);
  return co;
}

std::vector<DipEstimate> locate_dips(const std::vector<std::pair<double, double>>& points,
                                     double dip_depth) {
  std::vector<DipEstimate> dips;
  if (points.size() < 3) return dips;
  double baseline = 0.0;
  for (const auto& [x, t] : points) baseline = std::max(baseline, t);
  const double threshold = 1.0 - 0.4 * dip_depth;
  for (std::size_t i = 1; i + 1 < points.size(); ++i) {
    const double t = points[i].second;
    if (t >= threshold) continue;
    if (!(t < points[i - 1].second && t <= points[i + 1].second)) continue;
    // parabolic refinement of the minimum
    const double y0 = points[i - 1].second, y1 = t, y2 = points[i + 1].second;
    const double denom = y0 - 2.0 * y1 + y2;
    const double frac = (denom > 0.0) ? 0.5 * (y0 - y2) / denom : 0.0;
    const double step = points[i + 1].first - points[i].first;
    DipEstimate dip;
    dip.center_nm = points[i].first + frac * step;
    dip.depth = baseline - y1;
    // half-depth crossings, linearly interpolated
    const double level = 0.5 * (y1 + baseline);
    double left = points[i].first, right = points[i].first;
    for (std::size_t j = i; j-- > 0;) {
      if (points[j].second >= level) {
        const double f = (level - points[j].second) /
                         (points[j + 1].second - points[j].second);
        left = points[j].first + f * (points[j + 1].first - points[j].first);
        break;
      }
    }
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      if (points[j].second >= level) {
        const double f = (level - points[j - 1].second) /
                         (points[j].second - points[j - 1].second);
        right = points[j - 1].first + f * (points[j].first - points[j - 1].first);
        break;
      }
    }
    dip.fwhm_nm = right - left;
    dips.push_back(dip);
    while (i + 1 < points.size() && points[i + 1].second < threshold) ++i;
  }
  return dips;
}

}  // namespace

RunReport run_scenario(const Scenario& scenario, const ExperimentConfig& cfg) {
  scenario.validate();
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();

  RunReport report;
  report.kind = scenario.kind;
  report.charge = scenario.charge;
  report.seed = scenario.seed;
  report.config_hash = cfg.hash();
  report.period_ns = cfg.pump.period_ps() / 1e3;
  report.window_ps = cfg.analysis.window_ps;

  const std::uint64_t n_pulses = scenario.pulses_override.value_or(cfg.pump.pulse_count());

  switch (scenario.kind) {
    case ScenarioKind::sww_only: {
      // both photons leave through the bus/output grating; no emitter factors
      report.pulses_simulated = n_pulses;
      const double s_s =
          arm_survival(ArmPath::idler_through_bus, 0, cfg.loss, cfg.emitter, cfg.spad_signal);
      const double s_i =
          arm_survival(ArmPath::idler_through_bus, 0, cfg.loss, cfg.emitter, cfg.spad_idler);
      add_oracle_warnings(cfg, s_s, s_i, report.warnings);
      report.coincidence = run_coincidence(scenario, cfg, s_s, s_i, n_pulses, report);
      break;
    }
    case ScenarioKind::oam_run: {
      report.pulses_simulated = n_pulses;
      const int l = *scenario.charge;
      const double lambda_s = l > 0 ? cfg.run.lambda_s_pos_nm : cfg.run.lambda_s_neg_nm;
      const double lambda_i = idler_wavelength(cfg.pump.lambda_p_nm, lambda_s);
      if (!raman_band_clear(cfg.pump.lambda_p_nm, lambda_s, cfg.run.raman_guard_linewidths) ||
          !raman_band_clear(cfg.pump.lambda_p_nm, lambda_i, cfg.run.raman_guard_linewidths))
        report.warnings.push_back("signal or idler falls inside the silicon Raman band");

      const double power = required_power_mw(l, lambda_s, cfg.resonator);
      const DriveSetting drive = drive_for_power(power, cfg.resonator);
      const auto photon = try_emit(lambda_s, drive, cfg.resonator, cfg.emitter);
      if (!photon || photon->charge != l)
        throw UnreachableChargeError(
            "oam_run: drive from required_power failed to align charge " + std::to_string(l));

      DriveReport dr;
      dr.order = *aligned_order(lambda_s, drive, cfg.resonator, 0.5 * cfg.resonator.fwhm_nm);
      dr.charge = l;
      dr.l_left = photon->l_left;
      dr.l_right = photon->l_right;
      dr.power_mw = power;
      dr.voltage_v = drive.voltage_v;
      dr.lambda_s_nm = lambda_s;
      dr.lambda_i_nm = lambda_i;
      report.drive = dr;

      const double s_s = arm_survival(ArmPath::signal_through_emitter, l, cfg.loss, cfg.emitter,
                                      cfg.spad_signal);
      const double s_i =
          arm_survival(ArmPath::idler_through_bus, l, cfg.loss, cfg.emitter, cfg.spad_idler);
      add_oracle_warnings(cfg, s_s, s_i, report.warnings);
      report.coincidence = run_coincidence(scenario, cfg, s_s, s_i, n_pulses, report);
      report.pre_detection_cc =
          pre_detection_cc_estimate(cfg, l, static_cast<double>(n_pulses));
      break;
    }
    case ScenarioKind::spectrum_sweep: {
      SweepOutcome sw;
      sw.power_mw = scenario.sweep.power_mw;
      const DriveSetting drive = drive_for_power(scenario.sweep.power_mw, cfg.resonator);
      const auto steps = static_cast<std::size_t>(
          std::floor((scenario.sweep.to_nm - scenario.sweep.from_nm) / scenario.sweep.step_nm));
      sw.points.reserve(steps + 1);
      for (std::size_t i = 0; i <= steps; ++i) {
        const double lambda = scenario.sweep.from_nm + static_cast<double>(i) * scenario.sweep.step_nm;
        sw.points.emplace_back(lambda, transmission(lambda, drive, cfg.resonator));
      }
      sw.dips = locate_dips(sw.points, cfg.resonator.dip_depth);
      report.sweep = std::move(sw);
      break;
    }
    case ScenarioKind::tomography: {
      report.tomography_shots = scenario.tomography_shots;
      report.purity = measure_purity_tomography(cfg.emitter, cfg.loss, cfg.spad_signal,
                                                *scenario.charge, scenario.tomography_shots,
                                                scenario.seed);
      break;
    }
    case ScenarioKind::calibrate: {
      report.calibration = calibrate(cfg.targets, cfg);
      break;
    }
  }

  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

// ---------------------------------------------------------------------------
// report emission

namespace {

ordered_json json_of(const CarStats& car) {
  ordered_json j;
  j["car_min"] = car.car_min;
  j["car_max"] = car.car_max;
  j["car_mean"] = car.car_mean;
  if (car.infinite_flag) j["car_infinite"] = true;
  return j;
}

}  // namespace

std::string RunReport::to_json() const {
  ordered_json j;
  j["scenario"] = to_string(kind);
  if (charge)
    j["charge"] = *charge;
  j["seed"] = seed;
  j["config_hash"] = config_hash;
  if (kind == ScenarioKind::sww_only || kind == ScenarioKind::oam_run) {
    j["pulses_simulated"] = pulses_simulated;
    j["emitting_pulses"] = emitting_pulses;
  }
  if (coincidence) {
    j["cc"] = coincidence->cc;
    j["acc"] = coincidence->acc;
    const ordered_json car = json_of(coincidence->car);
    j.update(car);
    j["window_ps"] = window_ps;
    j["period_ns"] = period_ns;
    j["expected"] = {{"cc", coincidence->expected.cc},
                     {"acc_per_window", coincidence->expected.acc}};
    j["signal_clicks"] = coincidence->signal_clicks;
    j["idler_clicks"] = coincidence->idler_clicks;
  }
  if (drive) {
    j["drive"] = {{"order", drive->order},     {"charge", drive->charge},
                  {"l_left", drive->l_left},   {"l_right", drive->l_right},
                  {"power_mw", drive->power_mw}, {"voltage_v", drive->voltage_v},
                  {"lambda_s_nm", drive->lambda_s_nm}, {"lambda_i_nm", drive->lambda_i_nm},
                  {"circular_projection", "post_average"}};
  }
  if (pre_detection_cc) j["pre_detection_cc"] = *pre_detection_cc;
  if (purity) {
    ordered_json p;
    p["charge"] = charge ? *charge : 0;
    p["purity"] = purity->purity;
    p["std_error"] = purity->std_error;
    p["shots_per_mask"] = purity->shots_per_mask;
    p["intensities"] = purity->intensities;
    j["tomography"] = p;
  }
  if (sweep) {
    ordered_json s;
    s["power_mw"] = sweep->power_mw;
    s["points"] = sweep->points.size();
    ordered_json dips = ordered_json::array();
    for (const auto& d : sweep->dips)
      dips.push_back({{"center_nm", d.center_nm}, {"fwhm_nm", d.fwhm_nm}, {"depth", d.depth}});
    s["dips"] = dips;
    j["sweep"] = s;
  }
  if (calibration) {
    j["calibration"] = {{"mu", calibration->mu},
                        {"dark_s", calibration->dark_s},
                        {"dark_i", calibration->dark_i},
                        {"heater_ohms", calibration->heater_ohms},
                        {"cc_residual", calibration->cc_residual},
                        {"car_residual", calibration->car_residual}};
  }
  if (!warnings.empty()) j["warnings"] = warnings;
  return j.dump(2) + "\n";
}

std::string RunReport::to_csv() const {
  std::ostringstream out;
  out.precision(12);
  if (coincidence) {
    const auto& h = coincidence->histogram;
    out << "bin_start_ps,count\n";
    for (std::size_t i = 0; i < h.counts.size(); ++i)
      out << (h.origin_ps + static_cast<double>(i) * h.bin_width_ps) << "," << h.counts[i] << "\n";
  } else if (sweep) {
    out << "lambda_nm,transmission\n";
    out.precision(12);
    for (const auto& [lambda, t] : sweep->points) out << lambda << "," << t << "\n";
  } else if (purity) {
    out << "mask,intensity\n";
    for (int m = kSpectrumMin; m <= kSpectrumMax; ++m)
      out << m << "," << purity->intensities[static_cast<std::size_t>(spectrum_index(m))] << "\n";
  } else if (calibration) {
    out << "key,value\n";
    out.precision(17);
    out << "mu," << calibration->mu << "\n";
    out << "dark_s," << calibration->dark_s << "\n";
    out << "dark_i," << calibration->dark_i << "\n";
    out << "heater_ohms," << calibration->heater_ohms << "\n";
  }
  return out.str();
}

void emit_report(const RunReport& report, ReportFormat format, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open report path for writing: " + path);
  out << (format == ReportFormat::json ? report.to_json() : report.to_csv());
  if (!out) throw IoError("failed writing report: " + path);
}

void write_histogram_csv(const TcspcHistogram& hist, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open histogram path for writing: " + path);
  out.precision(12);
  out << "bin_start_ps,count\n";
  for (std::size_t i = 0; i < hist.counts.size(); ++i)
    out << (hist.origin_ps + static_cast<double>(i) * hist.bin_width_ps) << ","
        << hist.counts[i] << "\n";
  if (!out) throw IoError("failed writing histogram: " + path);
}

}  // namespace oamsim
