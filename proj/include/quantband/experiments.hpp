#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "quantband/colored_noise.hpp"
#include "quantband/quantizer.hpp"
#include "quantband/scaling_law.hpp"
#include "quantband/signal.hpp"
#include "quantband/spectral.hpp"

namespace quantband {

// ---------------------------------------------------------------------------
// Scaling-law validation

struct ValidationConfig {
  double alpha = 2.0;
  double sample_rate_hz = 20000.0;
  Eigen::Index n_samples = 100000;
  BitRange bits{7, 12};
  int trials = 20;
  std::uint64_t master_seed = 1;
  FloorMethod floor_method = FloorMethod::theoretical;
  /// Quantizer full-scale range; signals are peak-normalized to 1.
  double range = 2.0;
  Eigen::Index segment_len = kDefaultSegmentLength;
  std::vector<PeakSpec> peaks;
};

void validate(const ValidationConfig& cfg);

struct BitCutoffStats {
  int bits = 0;
  double mean_hz = 0.0;
  double std_hz = 0.0;
  /// Trial mean of the closed-form cutoff evaluated with the fitted alpha and S0.
  double predicted_hz = 0.0;
  /// Trial mean of the floor used for detection.
  double floor_mean = 0.0;
  /// Trials where the detected or predicted cutoff lies beyond Nyquist.
  int nyquist_trials = 0;
  bool excluded = false;
};

struct StepRatio {
  int from_bits = 0;
  int to_bits = 0;
  double mean = 0.0;
  double std = 0.0;
  /// |mean - predicted| / predicted.
  double relative_error = 0.0;
};

struct ValidationReport {
  ValidationConfig config;
  std::vector<BitCutoffStats> per_bit;
  /// Only between consecutive non-excluded bit depths.
  std::vector<StepRatio> ratios;
  double predicted_ratio = 0.0;
  /// Mean and std over every (trial, step) ratio.
  double mean_ratio = 0.0;
  double mean_ratio_std = 0.0;
  /// Mean of the per-step relative errors.
  double mean_error = 0.0;
  double max_error = 0.0;
  std::vector<int> excluded_bits;
  double mean_fitted_alpha = 0.0;
  std::int64_t saturated_samples = 0;
};

/// synthesize -> PSD -> detect the cutoff at each bit depth, aggregated over trials.
/// Throws NoMeasurableBandError when fewer than two consecutive bit depths survive
/// Nyquist exclusion.
ValidationReport run_validation(const ValidationConfig& cfg);

// ---------------------------------------------------------------------------
// Quantization-noise color

struct NoiseSweepConfig {
  std::vector<double> alphas{1.0, 1.5, 2.0, 2.5, 3.0};
  BitRange bits{4, 12};
  int trials = 20;
  Eigen::Index n_samples = 100000;
  double sample_rate_hz = 2000.0;
  std::uint64_t master_seed = 1;
  double range = 2.0;
  double white_threshold = kWhiteThreshold;
};

struct NoiseColorRow {
  double alpha = 0.0;
  /// Trial-mean slope and the derived whiteness flag.
  NoiseColorReport report;
  double slope_std = 0.0;
};

struct NoiseColorTable {
  NoiseSweepConfig config;
  /// Ordered by alpha, then bits.
  std::vector<NoiseColorRow> rows;
  /// Parallel to config.alphas.
  std::vector<std::optional<int>> n_min;
};

NoiseColorTable run_noise_color_sweep(const NoiseSweepConfig& cfg);

// ---------------------------------------------------------------------------
// Sensitivity of the prediction to a misestimated alpha

struct SensitivityEntry {
  double delta_alpha = 0.0;
  double perturbed_alpha = 0.0;
  double predicted_ratio = 0.0;
  /// |predicted - measured| / measured.
  double relative_error = 0.0;
};

struct SensitivityReport {
  ValidationReport baseline;
  double measured_ratio = 0.0;
  /// |2^(2/alpha) - measured| / measured at the true alpha.
  double baseline_error = 0.0;
  std::vector<SensitivityEntry> entries;
};

SensitivityReport run_sensitivity(const ValidationConfig& cfg,
                                  const std::vector<double>& perturbations);
/// Reuses an existing validation run as the measured reference.
SensitivityReport sensitivity_from(const ValidationReport& baseline,
                                   const std::vector<double>& perturbations);

// ---------------------------------------------------------------------------
// Robustness to spectral peaks

struct PeakRobustnessEntry {
  PeakSpec peak;
  ValidationReport report;
};

struct PeakRobustnessReport {
  ValidationReport baseline;
  std::vector<PeakRobustnessEntry> entries;
};

/// Validation with each peak injected on its own; the baseline drops any peaks in `base`.
PeakRobustnessReport run_peak_robustness(const ValidationConfig& base,
                                         const std::vector<PeakSpec>& peaks);

// ---------------------------------------------------------------------------
// Band-power preservation

struct NamedBand {
  std::string name;
  FrequencyBand band;
};

inline constexpr double kPreservedLow = 0.8;
inline constexpr double kPreservedHigh = 1.2;

/// Delta 0.5-4, Theta 4-8, Alpha 8-13, Beta 13-30, Gamma 30-Nyquist (Hz).
std::vector<NamedBand> default_eeg_bands(double sample_rate_hz);

struct BandPowerRow {
  NamedBand band;
  double power_original = 0.0;
  double power_quantized = 0.0;
  double ratio = 0.0;
  bool preserved = false;
};

struct BandPowerReport {
  QuantizerConfig quantizer;
  double sample_rate_hz = 0.0;
  Eigen::Index n_samples = 0;
  Eigen::Index segment_len = 0;
  std::int64_t saturated_samples = 0;
  std::vector<BandPowerRow> rows;
};

/// Ratio of quantized to original band power from trapezoidal integrals of Welch PSDs.
/// A segment_len of 0 picks min(4096, signal length).
BandPowerReport run_band_power(const Signal& signal, const QuantizerConfig& cfg,
                               const std::vector<NamedBand>& bands,
                               Eigen::Index segment_len = 0);

// ---------------------------------------------------------------------------
// Single-signal analysis

struct SignalAnalysis {
  QuantizerConfig quantizer;
  double sample_rate_hz = 0.0;
  Eigen::Index n_samples = 0;
  Eigen::Index segment_len = 0;
  SpectralFit fit;
  NoiseColorReport noise;
  double theoretical_floor = 0.0;
  double empirical_floor = 0.0;
  CutoffEstimate predicted;
  /// Empty when the floor buries the whole spectrum.
  std::optional<CutoffEstimate> cutoff_theoretical;
  std::optional<CutoffEstimate> cutoff_empirical;
  std::int64_t saturated_samples = 0;
};

SignalAnalysis analyze_signal(const Signal& signal, const QuantizerConfig& cfg,
                              Eigen::Index segment_len = kDefaultSegmentLength);

}  // namespace quantband
