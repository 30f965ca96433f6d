#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Core>

#include "quantband/signal.hpp"

namespace quantband {

/// One-sided power spectral density on a uniform grid that excludes DC.
struct Psd {
  Eigen::ArrayXd freqs_hz;
  Eigen::ArrayXd power;
  double df_hz = 0.0;
  /// Rate of the signal the estimate came from.
  double sample_rate_hz = 0.0;

  Eigen::Index size() const noexcept { return freqs_hz.size(); }
  double nyquist_hz() const noexcept { return 0.5 * sample_rate_hz; }
  double max_freq_hz() const { return freqs_hz[freqs_hz.size() - 1]; }
};

/// Closed frequency interval [low_hz, high_hz].
struct FrequencyBand {
  double low_hz = 0.0;
  double high_hz = 0.0;

  friend bool operator==(const FrequencyBand&, const FrequencyBand&) = default;
};

struct SpectralFit {
  /// Slope of log10(power) against log10(freq); the spectral exponent is -slope.
  double slope = 0.0;
  /// log10 power density at 1 Hz on the fitted line.
  double intercept_log10 = 0.0;
  FrequencyBand fit_band_hz;
  double rms_residual = 0.0;
  /// Number of points that entered the regression.
  Eigen::Index points = 0;

  double alpha_hat() const noexcept { return -slope; }
  double s0() const noexcept { return std::pow(10.0, intercept_log10); }
};

inline constexpr Eigen::Index kDefaultSegmentLength = 4096;
inline constexpr double kDefaultOverlap = 0.5;

void validate(const Psd& psd);

/// Periodic Hann window of length n.
template <typename Scalar = double>
Eigen::Array<Scalar, Eigen::Dynamic, 1> hann_window(Eigen::Index n) {
  using Array = Eigen::Array<Scalar, Eigen::Dynamic, 1>;
  const Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
  return Scalar(0.5) -
         Scalar(0.5) * (Array::LinSpaced(n, Scalar(0), Scalar(n - 1)) * (two_pi / Scalar(n))).cos();
}

/// Median of an Eigen vector expression; averages the middle pair for even sizes.
template <typename Derived>
typename Derived::Scalar median(const Eigen::DenseBase<Derived>& values) {
  using Scalar = typename Derived::Scalar;
  std::vector<Scalar> v(static_cast<std::size_t>(values.size()));
  for (Eigen::Index i = 0; i < values.size(); ++i) v[static_cast<std::size_t>(i)] = values(i);
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const Scalar upper = *mid;
  const Scalar lower = *std::max_element(v.begin(), mid);
  return (lower + upper) / Scalar(2);
}

/// Centered moving average; windows are truncated at the ends.
template <typename Derived>
Eigen::Array<typename Derived::Scalar, Eigen::Dynamic, 1> moving_average(
    const Eigen::ArrayBase<Derived>& x, Eigen::Index width) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = x.size();
  const Eigen::Index half = width / 2;
  Eigen::Array<Scalar, Eigen::Dynamic, 1> out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index lo = std::max<Eigen::Index>(0, i - half);
    const Eigen::Index hi = std::min<Eigen::Index>(n - 1, i + half);
    out[i] = x.derived().segment(lo, hi - lo + 1).mean();
  }
  return out;
}

/// Trapezoidal integral of y over the abscissae x.
template <typename DerivedX, typename DerivedY>
typename DerivedY::Scalar trapezoid(const Eigen::ArrayBase<DerivedX>& x,
                                    const Eigen::ArrayBase<DerivedY>& y) {
  const Eigen::Index n = x.size();
  if (n < 2) return typename DerivedY::Scalar(0);
  const auto dx = x.derived().tail(n - 1) - x.derived().head(n - 1);
  const auto avg = (y.derived().tail(n - 1) + y.derived().head(n - 1)) / 2;
  return (dx * avg).sum();
}

/// Welch estimate with a periodic Hann window and per-segment mean removal.
///
/// Density scaling: sum(power) * df approximates the signal variance. The DC bin is
/// dropped from the returned grid.
Psd welch_psd(const Signal& signal, Eigen::Index segment_len = kDefaultSegmentLength,
              double overlap_fraction = kDefaultOverlap);

/// [10 df, fs/4].
FrequencyBand default_fit_band(const Psd& psd);

/// Ordinary least squares of log10 power on log10 frequency over the band's bins.
SpectralFit fit_slope(const Psd& psd, const FrequencyBand& band);

/// Least squares over log-frequency bins: bins evenly spaced in log10 f across the
/// band, each contributing its mean log10 f and mean log10 power. Every frequency
/// decade then carries equal weight.
SpectralFit fit_slope_log_binned(const Psd& psd, const FrequencyBand& band,
                                 Eigen::Index log_bins);

/// Median power over bins at or above 0.75 x the highest grid frequency.
double empirical_noise_floor(const Psd& psd);

/// Trapezoidal integral of the PSD over the grid bins inside the band.
double band_power(const Psd& psd, const FrequencyBand& band);

}  // namespace quantband
