#include "quantband/colored_noise.hpp"

#include <cmath>
#include <complex>
#include <random>
#include <string>

#include <unsupported/Eigen/FFT>

#include "quantband/errors.hpp"

namespace quantband {

void validate(const PeakSpec& peak, double sample_rate_hz) {
  if (!std::isfinite(peak.center_hz) || !std::isfinite(peak.width_hz) ||
      !std::isfinite(peak.amplitude_factor)) {
    throw ValidationError("peak parameters must be finite");
  }
  if (!(peak.width_hz > 0.0)) throw ValidationError("peak width must be positive");
  if (peak.amplitude_factor < 0.0) {
    throw ValidationError("peak amplitude factor must be non-negative");
  }
  const double nyquist = 0.5 * sample_rate_hz;
  if (!(peak.center_hz > 0.0) || !(peak.center_hz + 3.0 * peak.width_hz < nyquist)) {
    throw ValidationError("peak at " + std::to_string(peak.center_hz) + " Hz (width " +
                          std::to_string(peak.width_hz) +
                          " Hz) must satisfy 0 < center and center + 3*width < Nyquist (" +
                          std::to_string(nyquist) + " Hz)");
  }
}

void validate(const SynthesisSpec& spec) {
  if (!std::isfinite(spec.alpha) || spec.alpha < 0.0) {
    throw ValidationError("alpha must be finite and >= 0, got " + std::to_string(spec.alpha));
  }
  if (spec.n_samples < 16) {
    throw ValidationError("n_samples must be >= 16, got " + std::to_string(spec.n_samples));
  }
  if (!std::isfinite(spec.sample_rate_hz) || !(spec.sample_rate_hz > 0.0)) {
    throw ValidationError("sample rate must be positive and finite");
  }
  for (const auto& p : spec.peaks) validate(p, spec.sample_rate_hz);
}

double peak_multiplier(const std::vector<PeakSpec>& peaks, double freq_hz) {
  double m = 1.0;
  for (const auto& p : peaks) {
    const double z = (freq_hz - p.center_hz) / p.width_hz;
    m += p.amplitude_factor * std::exp(-0.5 * z * z);
  }
  return m;
}

Signal synthesize(const SynthesisSpec& spec) {
  validate(spec);
  const Eigen::Index n = spec.n_samples;
  const Eigen::Index half = n / 2;
  const double df = spec.sample_rate_hz / static_cast<double>(n);

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<std::complex<double>> spectrum(static_cast<std::size_t>(half + 1));
  spectrum[0] = 0.0;
  for (Eigen::Index k = 1; k <= half; ++k) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    const double f = df * static_cast<double>(k);
    const double amp =
        std::pow(f, -0.5 * spec.alpha) * std::sqrt(peak_multiplier(spec.peaks, f));
    spectrum[static_cast<std::size_t>(k)] = {amp * re, amp * im};
  }
  if (n % 2 == 0) {
    auto& nyq = spectrum[static_cast<std::size_t>(half)];
    nyq = {nyq.real(), 0.0};
  }

  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<double> time(static_cast<std::size_t>(n));
  fft.inv(time.data(), spectrum.data(), n);

  Eigen::ArrayXd x = Eigen::Map<const Eigen::ArrayXd>(time.data(), n);
  x -= x.mean();
  const double peak = x.abs().maxCoeff();
  if (!(peak > 0.0) || !std::isfinite(peak)) {
    throw ValidationError("synthesized signal is degenerate");
  }
  x /= peak;
  return Signal{std::move(x), spec.sample_rate_hz};
}

Eigen::ArrayXd target_psd_shape(const SynthesisSpec& spec,
                                const Eigen::Ref<const Eigen::ArrayXd>& freqs_hz) {
  Eigen::ArrayXd out(freqs_hz.size());
  const double nyquist = 0.5 * spec.sample_rate_hz;
  for (Eigen::Index i = 0; i < freqs_hz.size(); ++i) {
    const double f = freqs_hz[i];
    if (!(f > 0.0) || !std::isfinite(f)) {
      throw ValidationError("target_psd_shape: frequencies must be positive, got " +
                            std::to_string(f));
    }
    if (spec.sample_rate_hz > 0.0 && f > nyquist) {
      throw ValidationError("target_psd_shape: frequency " + std::to_string(f) +
                            " Hz exceeds Nyquist");
    }
    out[i] = std::pow(f, -spec.alpha) * peak_multiplier(spec.peaks, f);
  }
  return out;
}

}  // namespace quantband
