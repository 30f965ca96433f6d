#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include <Eigen/Core>

#include "quantband/quantizer.hpp"
#include "quantband/signal.hpp"
#include "quantband/spectral.hpp"

namespace quantband {

enum class FloorMethod { theoretical, empirical };

std::string_view to_string(FloorMethod method) noexcept;
/// Parses "theoretical" / "empirical"; throws ValidationError otherwise.
FloorMethod parse_floor_method(std::string_view text);

struct CutoffEstimate {
  double f_c_hz = 0.0;
  double floor_value = 0.0;
  FloorMethod floor_method = FloorMethod::theoretical;
  bool exceeded_nyquist = false;
};

/// Inclusive range of bit depths.
struct BitRange {
  int lo = 4;
  int hi = 12;

  int count() const noexcept { return hi - lo + 1; }
  friend bool operator==(const BitRange&, const BitRange&) = default;
};

inline constexpr double kWhiteThreshold = 0.1;

struct NoiseColorReport {
  int bits = 0;
  double noise_slope = 0.0;
  double white_threshold = kWhiteThreshold;
  bool is_white = false;
};

/// Hysteresis for the floor-crossing detector.
struct CrossingRule {
  /// Centered moving-average width applied to log10 power, in bins.
  Eigen::Index smoothing_bins = 9;
  /// Consecutive sub-floor bins required before a crossing is accepted.
  Eigen::Index run_length = 5;
};

/// How the spectral slope of the quantization error is measured.
struct NoiseSlopeOptions {
  Eigen::Index segment_len = kDefaultSegmentLength;
  /// Fit band is [10 df, high_fraction * fs - df/2]; the default keeps every bin
  /// except the unpaired Nyquist bin.
  double high_fraction = 0.5;
  Eigen::Index log_bins = 30;
};

/// Bandwidth gain per extra bit, 2^(2/alpha).
double scaling_ratio(double alpha);

/// Cutoff where s0 f^-alpha meets step^2 / (6 fs):
/// f_c = (6 s0 fs / R^2)^(1/alpha) * 2^(2N/alpha).
/// The value is returned even above Nyquist; exceeded_nyquist flags it.
CutoffEstimate predicted_cutoff(double alpha, double s0, double sample_rate_hz,
                                const QuantizerConfig& cfg);

/// Lowest frequency at which the smoothed log-PSD falls below the floor and stays
/// below for `run_length` bins. The crossing is interpolated in log-log coordinates
/// inside the bin interval that precedes the run. With no crossing, f_c is Nyquist and
/// the estimate is flagged. Throws NoUsableBandError when the floor exceeds every PSD
/// value.
CutoffEstimate detect_cutoff(const Psd& psd, double floor_value, FloorMethod method,
                             const CrossingRule& rule = {});

/// Quantizes, forms the error signal and fits the slope of its PSD.
NoiseColorReport measure_noise_slope(const Signal& signal, const QuantizerConfig& cfg,
                                     double white_threshold = kWhiteThreshold,
                                     const NoiseSlopeOptions& options = {});

/// Synthetic inputs used for noise-color trials.
struct NoiseTrialSetup {
  Eigen::Index n_samples = 100000;
  double sample_rate_hz = 2000.0;
  /// Quantizer range; synthetic signals are peak-normalized to 1.
  double range = 2.0;
};

/// Noise slopes for every (trial, bit depth); rows are trials with seed master_seed + row.
Eigen::ArrayXXd noise_slope_grid(double alpha, const BitRange& bits, int trials,
                                 std::uint64_t master_seed, const NoiseTrialSetup& setup = {},
                                 const NoiseSlopeOptions& options = {});

/// Smallest bit depth whose trial-mean noise slope is white, if any.
std::optional<int> find_n_min(double alpha, const BitRange& bits, int trials,
                              std::uint64_t master_seed, const NoiseTrialSetup& setup = {},
                              double white_threshold = kWhiteThreshold);

}  // namespace quantband
