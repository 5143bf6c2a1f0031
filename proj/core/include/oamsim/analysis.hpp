#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "oamsim/detection.hpp"
#include "oamsim/emitter.hpp"

// TCSPC delay histogram between the heralding and heralded click streams,
// CC/ACC/CAR extraction in 320 ps windows, the closed-form expectation
// oracle, and the phase-mask tomography purity estimator.

namespace oamsim {

struct TcspcHistogram {
  double bin_width_ps = 64.0;
  double origin_ps = 0.0;  // left edge of counts[0]
  std::vector<std::uint64_t> counts;

  std::int64_t bin_of(double delay_ps) const;
  double bin_center_ps(std::int64_t bin) const;
  std::uint64_t total() const;
};

// Incremental histogram construction over time-ordered click blocks. Blocks
// must arrive in time order and be disjoint; clicks within span_ps of a
// block's trailing edge are retained to pair against the next block.
class HistogramBuilder {
 public:
  HistogramBuilder(double bin_width_ps, double span_ps);

  void feed(std::span<const ClickRecord> signal, std::span<const ClickRecord> idler,
            double block_end_ps);
  TcspcHistogram take();

  const TcspcHistogram& histogram() const { return hist_; }

 private:
  void pair_into(std::span<const ClickRecord> signal, std::span<const ClickRecord> idler);

  TcspcHistogram hist_;
  double span_ps_;
  std::vector<ClickRecord> signal_tail_, idler_tail_;
  double last_end_ps_ = -1.0;
};

// One-shot form over whole streams (delays = t_signal - t_idler, binned for
// every pair within +-span).
TcspcHistogram build_histogram(std::span<const ClickRecord> signal,
                               std::span<const ClickRecord> idler, double bin_width_ps,
                               double span_ps);

// Sum of the 5-bin (320 ps at 64 ps bins) window centered on the maximum
// bin; ties broken toward the delay closest to zero.
std::uint64_t extract_cc(const TcspcHistogram& hist, double window_ps = 320.0);

// The same window shape evaluated at +-j * period offsets from the main
// peak, j = 1..k/2.
std::vector<std::uint64_t> extract_acc(const TcspcHistogram& hist, double window_ps,
                                       double period_ns = 25.0, int k = 14);

struct CarStats {
  double car_min = 0.0;
  double car_max = 0.0;
  double car_mean = 0.0;
  bool infinite_flag = false;  // some window had zero accidentals
  int finite_windows = 0;
};

CarStats car_stats(std::uint64_t cc, std::span<const std::uint64_t> acc);

// Window model for the oracle: pair_capture is the fraction of the
// jitter-spread photon-photon delay mass inside one window, uniform_fraction
// the window's share of the flat dark-involved mass. Defaults reproduce the
// plain first-order algebra (whole-mass counting).
struct WindowModel {
  double pair_capture = 1.0;
  double uniform_fraction = 1.0;

  static WindowModel for_windows(double window_ps, double period_ps, double jitter_sigma_s_ps,
                                 double jitter_sigma_i_ps);

  // Capture of the j-th side window. Side windows are centered on the bin
  // nearest j*period, which sits up to half a bin off the true peak when
  // bin_width does not divide the period (64 ps vs 25 ns here), so their
  // capture is slightly below the centered-window value.
  static double side_peak_capture(double window_ps, double bin_width_ps, double period_ps,
                                  double jitter_sigma_s_ps, double jitter_sigma_i_ps, int j);
};

struct ExpectedCounts {
  double cc = 0.0;
  double acc = 0.0;  // per side window
};

// First-order coincidence algebra:
//   cc  = n * [capture*mu*ss*si*(1+mu) + w*(mu*ss*di + ds*mu*si + ds*di)]
//   acc = n * [capture*mu^2*ss*si      + w*(mu*ss*di + ds*mu*si + ds*di)]
// With the default WindowModel this reduces to cc = n*mu*ss*si + acc and
// acc = n*(mu*ss + ds)*(mu*si + di).
ExpectedCounts expected_counts(double mu, double survival_s, double survival_i, double dark_s,
                               double dark_i, double n_pulses,
                               const WindowModel& window = WindowModel{});

struct PurityEstimate {
  double purity = 0.0;
  double std_error = 0.0;
  std::array<std::uint64_t, kSpectrumSize> intensities{};
  std::uint64_t shots_per_mask = 0;
};

// 15 simulated intensity measurements with masks -7..7; purity is
// I_l / sum_{m=-6..6} I_m. shots_per_mask = 0 runs the noiseless limit
// (expected intensities).
PurityEstimate measure_purity_tomography(const EmitterParams& emitter, const LossBudget& budget,
                                         const SpadParams& signal_spad, int l_target,
                                         std::uint64_t shots_per_mask, std::uint64_t seed);

}  // namespace oamsim
