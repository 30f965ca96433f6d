#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "quantband/signal.hpp"

namespace quantband {

/// Gaussian bump added on top of the power-law spectrum.
struct PeakSpec {
  double center_hz = 0.0;
  /// Standard deviation of the bump in Hz.
  double width_hz = 1.0;
  /// Height at the center as a multiple of the local power-law level.
  double amplitude_factor = 0.0;

  friend bool operator==(const PeakSpec&, const PeakSpec&) = default;
};

struct SynthesisSpec {
  double alpha = 0.0;
  Eigen::Index n_samples = 0;
  double sample_rate_hz = 0.0;
  std::uint64_t seed = 0;
  std::vector<PeakSpec> peaks;
};

void validate(const PeakSpec& peak, double sample_rate_hz);
void validate(const SynthesisSpec& spec);

/// Multiplicative peak factor 1 + sum_i A_i exp(-(f - c_i)^2 / (2 w_i^2)).
double peak_multiplier(const std::vector<PeakSpec>& peaks, double freq_hz);

/// Zero-mean 1/f^alpha Gaussian noise with max |x| = 1.
///
/// The spectrum is shaped in the frequency domain: each positive bin gets a
/// complex Gaussian coefficient scaled by f^(-alpha/2) * sqrt(peak multiplier),
/// the DC bin is zero and the Nyquist bin (even lengths) is real. The result is
/// a deterministic function of the spec, seed included.
Signal synthesize(const SynthesisSpec& spec);

/// f^-alpha times the peak multiplier at each frequency (unnormalized).
Eigen::ArrayXd target_psd_shape(const SynthesisSpec& spec,
                                const Eigen::Ref<const Eigen::ArrayXd>& freqs_hz);

/// Seed for trial `index` of a multi-trial run.
constexpr std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t index) noexcept {
  return master_seed + index;
}

}  // namespace quantband
