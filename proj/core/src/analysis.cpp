#include "oamsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "oamsim/errors.hpp"
#include "oamsim/rng.hpp"

namespace oamsim {

namespace {
constexpr std::uint32_t kTomographyStreamTag = 0x544f4d4f;  // "TOMO"

void check_sorted(std::span<const ClickRecord> clicks, const char* name) {
  for (std::size_t i = 1; i < clicks.size(); ++i)
    if (clicks[i].time_ps < clicks[i - 1].time_ps)
      throw UnsortedInputError(std::string("build_histogram: ") + name +
                               " stream is not time-sorted");
}
}  // namespace

std::int64_t TcspcHistogram::bin_of(double delay_ps) const {
  return static_cast<std::int64_t>(std::floor((delay_ps - origin_ps) / bin_width_ps));
}

double TcspcHistogram::bin_center_ps(std::int64_t bin) const {
  return origin_ps + (static_cast<double>(bin) + 0.5) * bin_width_ps;
}

std::uint64_t TcspcHistogram::total() const {
  std::uint64_t t = 0;
  for (auto c : counts) t += c;
  return t;
}

HistogramBuilder::HistogramBuilder(double bin_width_ps, double span_ps) : span_ps_(span_ps) {
  if (!(bin_width_ps > 0.0) || !(span_ps > 0.0))
    throw DomainError("HistogramBuilder: bin width and span must be positive");
  // bins cover [-K*w - w/2, K*w + w/2) so that delay 0 is a bin center
  const auto half_bins = static_cast<std::int64_t>(std::ceil(span_ps / bin_width_ps));
  hist_.bin_width_ps = bin_width_ps;
  hist_.origin_ps = -(static_cast<double>(half_bins) + 0.5) * bin_width_ps;
  hist_.counts.assign(static_cast<std::size_t>(2 * half_bins + 1), 0);
}

void HistogramBuilder::pair_into(std::span<const ClickRecord> signal,
                                 std::span<const ClickRecord> idler) {
  // two-pointer sweep: for each idler click, bin delays to all signal clicks
  // within +-span
  std::size_t lo = 0;
  for (const ClickRecord& ic : idler) {
    while (lo < signal.size() && signal[lo].time_ps < ic.time_ps - span_ps_) ++lo;
    for (std::size_t j = lo; j < signal.size() && signal[j].time_ps <= ic.time_ps + span_ps_; ++j) {
      const auto bin = hist_.bin_of(signal[j].time_ps - ic.time_ps);
      if (bin >= 0 && bin < static_cast<std::int64_t>(hist_.counts.size()))
        ++hist_.counts[static_cast<std::size_t>(bin)];
    }
  }
}

void HistogramBuilder::feed(std::span<const ClickRecord> signal,
                            std::span<const ClickRecord> idler, double block_end_ps) {
  check_sorted(signal, "signal");
  check_sorted(idler, "idler");
  if (last_end_ps_ >= 0.0) {
    if ((!signal.empty() && signal.front().time_ps < last_end_ps_) ||
        (!idler.empty() && idler.front().time_ps < last_end_ps_))
      throw UnsortedInputError("HistogramBuilder: block overlaps the previous block");
  }

  pair_into(signal, idler);
  pair_into(signal, idler_tail_);
  pair_into(signal_tail_, idler);

  auto keep_tail = [&](std::vector<ClickRecord>& tail, std::span<const ClickRecord> fresh) {
    std::vector<ClickRecord> next;
    const double cutoff = block_end_ps - span_ps_;
    for (const auto& c : tail)
      if (c.time_ps >= cutoff) next.push_back(c);
    for (const auto& c : fresh)
      if (c.time_ps >= cutoff) next.push_back(c);
    tail = std::move(next);
  };
  keep_tail(signal_tail_, signal);
  keep_tail(idler_tail_, idler);
  last_end_ps_ = block_end_ps;
}

TcspcHistogram HistogramBuilder::take() { return std::move(hist_); }

TcspcHistogram build_histogram(std::span<const ClickRecord> signal,
                               std::span<const ClickRecord> idler, double bin_width_ps,
                               double span_ps) {
  HistogramBuilder builder(bin_width_ps, span_ps);
  double end = 0.0;
  if (!signal.empty()) end = std::max(end, signal.back().time_ps);
  if (!idler.empty()) end = std::max(end, idler.back().time_ps);
  builder.feed(signal, idler, end + 1.0);
  return builder.take();
}

namespace {
std::int64_t main_peak_bin(const TcspcHistogram& hist) {
  std::uint64_t best = 0;
  std::int64_t best_bin = -1;
  for (std::size_t i = 0; i < hist.counts.size(); ++i) {
    const auto bin = static_cast<std::int64_t>(i);
    if (hist.counts[i] > best ||
        (hist.counts[i] == best && best_bin >= 0 &&
         std::abs(hist.bin_center_ps(bin)) < std::abs(hist.bin_center_ps(best_bin)))) {
      best = hist.counts[i];
      best_bin = bin;
    }
  }
  if (best == 0) throw DegenerateHistogramError("extract_cc: histogram is empty");
  return best_bin;
}

std::uint64_t window_sum(const TcspcHistogram& hist, std::int64_t center, int half_bins) {
  std::uint64_t sum = 0;
  for (std::int64_t b = center - half_bins; b <= center + half_bins; ++b) {
    if (b < 0 || b >= static_cast<std::int64_t>(hist.counts.size()))
      throw SpanTooSmallError("window extends past the histogram span");
    sum += hist.counts[static_cast<std::size_t>(b)];
  }
  return sum;
}

int window_half_bins(const TcspcHistogram& hist, double window_ps) {
  const int bins = static_cast<int>(std::lround(window_ps / hist.bin_width_ps));
  if (bins < 1 || bins % 2 == 0)
    throw DomainError("window must span an odd positive number of bins (got " +
                      std::to_string(bins) + ")");
  return bins / 2;
}
}  // namespace

std::uint64_t extract_cc(const TcspcHistogram& hist, double window_ps) {
  return window_sum(hist, main_peak_bin(hist), window_half_bins(hist, window_ps));
}

std::vector<std::uint64_t> extract_acc(const TcspcHistogram& hist, double window_ps,
                                       double period_ns, int k) {
  if (k <= 0 || k % 2 != 0) throw DomainError("extract_acc: k must be positive and even");
  const std::int64_t main = main_peak_bin(hist);
  const int half = window_half_bins(hist, window_ps);
  const double period_bins = period_ns * 1e3 / hist.bin_width_ps;
  std::vector<std::uint64_t> acc;
  acc.reserve(static_cast<std::size_t>(k));
  for (int j = k / 2; j >= 1; --j)
    acc.push_back(window_sum(hist, main - std::llround(j * period_bins), half));
  for (int j = 1; j <= k / 2; ++j)
    acc.push_back(window_sum(hist, main + std::llround(j * period_bins), half));
  return acc;
}

CarStats car_stats(std::uint64_t cc, std::span<const std::uint64_t> acc) {
  CarStats stats;
  stats.car_min = std::numeric_limits<double>::infinity();
  stats.car_max = 0.0;
  double sum = 0.0;
  for (auto a : acc) {
    if (a == 0) {
      stats.infinite_flag = true;  // CAR unbounded there; report cc as a lower bound
      continue;
    }
    const double car = static_cast<double>(cc) / static_cast<double>(a);
    stats.car_min = std::min(stats.car_min, car);
    stats.car_max = std::max(stats.car_max, car);
    sum += car;
    ++stats.finite_windows;
  }
  if (stats.finite_windows == 0) {
    stats.car_min = stats.car_max = stats.car_mean =
        std::numeric_limits<double>::infinity();
  } else {
    stats.car_mean = sum / stats.finite_windows;
  }
  return stats;
}

double WindowModel::side_peak_capture(double window_ps, double bin_width_ps, double period_ps,
                                      double jitter_sigma_s_ps, double jitter_sigma_i_ps,
                                      int j) {
  const double sigma = std::hypot(jitter_sigma_s_ps, jitter_sigma_i_ps);
  if (sigma <= 0.0) return 1.0;
  const double true_center = j * period_ps;
  const double window_center =
      bin_width_ps * static_cast<double>(std::llround(true_center / bin_width_ps));
  const double delta = window_center - true_center;
  auto phi = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
  const double half = 0.5 * window_ps;
  return phi((delta + half) / sigma) - phi((delta - half) / sigma);
}

WindowModel WindowModel::for_windows(double window_ps, double period_ps, double jitter_sigma_s_ps,
                                     double jitter_sigma_i_ps) {
  const double sigma_delay = std::hypot(jitter_sigma_s_ps, jitter_sigma_i_ps);
  WindowModel w;
  w.pair_capture = (sigma_delay > 0.0)
                       ? std::erf(0.5 * window_ps / (sigma_delay * std::sqrt(2.0)))
                       : 1.0;
  w.uniform_fraction = window_ps / period_ps;
  return w;
}

ExpectedCounts expected_counts(double mu, double survival_s, double survival_i, double dark_s,
                               double dark_i, double n_pulses, const WindowModel& window) {
  const double pair_s = mu * survival_s;
  const double pair_i = mu * survival_i;
  const double flat = window.uniform_fraction *
                      (pair_s * dark_i + dark_s * pair_i + dark_s * dark_i);
  ExpectedCounts e;
  e.acc = n_pulses * (window.pair_capture * pair_s * pair_i + flat);
  e.cc = n_pulses * window.pair_capture * mu * survival_s * survival_i + e.acc;
  return e;
}

PurityEstimate measure_purity_tomography(const EmitterParams& emitter, const LossBudget& budget,
                                         const SpadParams& signal_spad, int l_target,
                                         std::uint64_t shots_per_mask, std::uint64_t seed) {
  if (l_target < kBasisMin || l_target > kBasisMax)
    throw UnknownChargeError("tomography: target charge outside basis -6..6");
  const ChargeSpectrum spectrum = default_spectrum(l_target, emitter);
  // the mask-independent part of the chain cancels in the purity ratio but
  // scales the recorded intensities
  const double chain = db_to_fraction(budget.signal_path_db(l_target)) *
                       budget.objective_coupling * signal_spad.det_efficiency;

  PurityEstimate est;
  est.shots_per_mask = shots_per_mask;
  double target_mass = 0.0, basis_mass = 0.0;

  for (int mask = kSpectrumMin; mask <= kSpectrumMax; ++mask) {
    const auto idx = static_cast<std::size_t>(spectrum_index(mask));
    const double p = spectrum[idx] * chain;
    double intensity;
    if (shots_per_mask == 0) {
      intensity = p;  // noiseless limit
    } else {
      rng::Xoshiro256pp gen(
          rng::substream_seed(seed, kTomographyStreamTag, static_cast<std::uint64_t>(idx)));
      std::uint64_t clicks = 0;
      for (std::uint64_t s = 0; s < shots_per_mask; ++s) clicks += gen.bernoulli(p) ? 1 : 0;
      est.intensities[idx] = clicks;
      intensity = static_cast<double>(clicks);
    }
    if (mask == l_target) target_mass = intensity;
    if (mask >= kBasisMin && mask <= kBasisMax) basis_mass += intensity;
  }

  if (basis_mass <= 0.0)
    throw DomainError("tomography: basis -6..6 recorded zero intensity");
  est.purity = target_mass / basis_mass;
  // binomial error on the ratio (approximate)
  est.std_error = (shots_per_mask == 0)
                      ? 0.0
                      : std::sqrt(std::max(est.purity * (1.0 - est.purity), 0.0) / basis_mass);
  return est;
}

}  // namespace oamsim
