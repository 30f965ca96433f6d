#include "quantband/scaling_law.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "quantband/colored_noise.hpp"
#include "quantband/errors.hpp"
#include "quantband/parallel.hpp"

namespace quantband {

std::string_view to_string(FloorMethod method) noexcept {
  return method == FloorMethod::theoretical ? "theoretical" : "empirical";
}

FloorMethod parse_floor_method(std::string_view text) {
  if (text == "theoretical") return FloorMethod::theoretical;
  if (text == "empirical") return FloorMethod::empirical;
  throw ValidationError("unknown floor method '" + std::string(text) +
                        "' (expected theoretical or empirical)");
}

double scaling_ratio(double alpha) {
  if (!std::isfinite(alpha) || !(alpha > 0.0)) {
    throw ValidationError("scaling ratio is undefined for alpha <= 0");
  }
  return std::exp2(2.0 / alpha);
}

CutoffEstimate predicted_cutoff(double alpha, double s0, double sample_rate_hz,
                                const QuantizerConfig& cfg) {
  validate(cfg);
  if (!std::isfinite(alpha) || !(alpha > 0.0)) throw ValidationError("alpha must be > 0");
  if (!std::isfinite(s0) || !(s0 > 0.0)) throw ValidationError("S0 must be > 0");
  if (!std::isfinite(sample_rate_hz) || !(sample_rate_hz > 0.0)) {
    throw ValidationError("sample rate must be > 0");
  }
  const double base = 6.0 * s0 * sample_rate_hz / (cfg.range * cfg.range);
  const double fc = std::pow(base, 1.0 / alpha) * std::exp2(2.0 * cfg.bits / alpha);
  if (!std::isfinite(fc) || !(fc > 0.0)) {
    throw ValidationError("predicted cutoff is not finite");
  }
  CutoffEstimate est;
  est.f_c_hz = fc;
  est.floor_value = theoretical_noise_floor(cfg, sample_rate_hz);
  est.floor_method = FloorMethod::theoretical;
  est.exceeded_nyquist = fc > 0.5 * sample_rate_hz;
  return est;
}

CutoffEstimate detect_cutoff(const Psd& psd, double floor_value, FloorMethod method,
                             const CrossingRule& rule) {
  validate(psd);
  if (!std::isfinite(floor_value) || !(floor_value > 0.0)) {
    throw ValidationError("noise floor must be positive and finite");
  }
  if (rule.smoothing_bins < 1 || rule.run_length < 1) {
    throw ValidationError("crossing rule needs positive smoothing and run length");
  }
  if (psd.power.maxCoeff() < floor_value) {
    throw NoUsableBandError("noise floor " + std::to_string(floor_value) +
                            " lies above the entire PSD; no usable band");
  }
  const Eigen::ArrayXd log_power =
      psd.power.max(std::numeric_limits<double>::min()).log10();
  const Eigen::ArrayXd smoothed = moving_average(log_power, rule.smoothing_bins);
  const double log_floor = std::log10(floor_value);

  CutoffEstimate est;
  est.floor_value = floor_value;
  est.floor_method = method;
  Eigen::Index run = 0;
  for (Eigen::Index i = 0; i < smoothed.size(); ++i) {
    run = smoothed[i] < log_floor ? run + 1 : 0;
    if (run == rule.run_length) {
      const Eigen::Index first = i - run + 1;
      est.f_c_hz = psd.freqs_hz[first];
      if (first > 0) {
        // Sub-bin crossing: interpolate the smoothed curve in log-log coordinates
        // between the last bin above the floor and the first bin below it.
        const double y0 = smoothed[first - 1];
        const double y1 = smoothed[first];
        const double x0 = std::log10(psd.freqs_hz[first - 1]);
        const double x1 = std::log10(psd.freqs_hz[first]);
        const double t = (y0 - log_floor) / (y0 - y1);
        est.f_c_hz = std::pow(10.0, x0 + t * (x1 - x0));
      }
      return est;
    }
  }
  est.f_c_hz = psd.nyquist_hz();
  est.exceeded_nyquist = true;
  return est;
}

NoiseColorReport measure_noise_slope(const Signal& signal, const QuantizerConfig& cfg,
                                     double white_threshold, const NoiseSlopeOptions& options) {
  if (!(white_threshold > 0.0)) throw ValidationError("white threshold must be positive");
  const Signal quantized = quantize(signal, cfg);
  const Psd psd = welch_psd(error_signal(signal, quantized), options.segment_len);
  const FrequencyBand band{10.0 * psd.df_hz,
                           options.high_fraction * signal.sample_rate_hz - 0.5 * psd.df_hz};
  const SpectralFit fit = fit_slope_log_binned(psd, band, options.log_bins);

  NoiseColorReport report;
  report.bits = cfg.bits;
  report.noise_slope = fit.slope;
  report.white_threshold = white_threshold;
  report.is_white = std::abs(fit.slope) < white_threshold;
  return report;
}

Eigen::ArrayXXd noise_slope_grid(double alpha, const BitRange& bits, int trials,
                                 std::uint64_t master_seed, const NoiseTrialSetup& setup,
                                 const NoiseSlopeOptions& options) {
  if (bits.lo < 1 || bits.hi < bits.lo) throw ValidationError("invalid bit range");
  if (trials < 1) throw ValidationError("trials must be >= 1");
  Eigen::ArrayXXd slopes(trials, bits.count());
  parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
    SynthesisSpec spec;
    spec.alpha = alpha;
    spec.n_samples = setup.n_samples;
    spec.sample_rate_hz = setup.sample_rate_hz;
    spec.seed = trial_seed(master_seed, t);
    const Signal x = synthesize(spec);
    for (int b = bits.lo; b <= bits.hi; ++b) {
      const auto r = measure_noise_slope(x, {b, setup.range}, kWhiteThreshold, options);
      slopes(static_cast<Eigen::Index>(t), b - bits.lo) = r.noise_slope;
    }
  });
  return slopes;
}

std::optional<int> find_n_min(double alpha, const BitRange& bits, int trials,
                              std::uint64_t master_seed, const NoiseTrialSetup& setup,
                              double white_threshold) {
  const Eigen::ArrayXXd slopes = noise_slope_grid(alpha, bits, trials, master_seed, setup);
  const Eigen::ArrayXd means = slopes.colwise().mean().transpose();
  for (Eigen::Index j = 0; j < means.size(); ++j) {
    if (std::abs(means[j]) < white_threshold) return bits.lo + static_cast<int>(j);
  }
  return std::nullopt;
}

}  // namespace quantband
