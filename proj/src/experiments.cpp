#include "quantband/experiments.hpp"

#include <cmath>
#include <string>

#include "quantband/errors.hpp"
#include "quantband/parallel.hpp"

namespace quantband {
namespace {

struct TrialResult {
  Eigen::ArrayXd cutoff_hz;
  Eigen::ArrayXd predicted_hz;
  Eigen::ArrayXd floor;
  Eigen::Array<bool, Eigen::Dynamic, 1> beyond_nyquist;
  double fitted_alpha = 0.0;
  std::int64_t saturated = 0;
};

TrialResult run_trial(const ValidationConfig& cfg, std::size_t index) {
  SynthesisSpec spec;
  spec.alpha = cfg.alpha;
  spec.n_samples = cfg.n_samples;
  spec.sample_rate_hz = cfg.sample_rate_hz;
  spec.seed = trial_seed(cfg.master_seed, index);
  spec.peaks = cfg.peaks;
  const Signal x = synthesize(spec);
  const Psd psd = welch_psd(x, cfg.segment_len);
  const SpectralFit fit = fit_slope(psd, default_fit_band(psd));

  const Eigen::Index nb = cfg.bits.count();
  TrialResult r;
  r.cutoff_hz.resize(nb);
  r.predicted_hz.resize(nb);
  r.floor.resize(nb);
  r.beyond_nyquist.resize(nb);
  r.fitted_alpha = fit.alpha_hat();
  r.saturated = saturation_count(x, {cfg.bits.lo, cfg.range});

  for (Eigen::Index j = 0; j < nb; ++j) {
    const QuantizerConfig q{cfg.bits.lo + static_cast<int>(j), cfg.range};
    double floor = 0.0;
    if (cfg.floor_method == FloorMethod::theoretical) {
      floor = theoretical_noise_floor(q, cfg.sample_rate_hz);
    } else {
      floor = empirical_noise_floor(welch_psd(quantize(x, q), cfg.segment_len));
    }
    const CutoffEstimate detected = detect_cutoff(psd, floor, cfg.floor_method);
    const CutoffEstimate predicted =
        predicted_cutoff(fit.alpha_hat(), fit.s0(), cfg.sample_rate_hz, q);
    r.cutoff_hz[j] = detected.f_c_hz;
    r.predicted_hz[j] = predicted.f_c_hz;
    r.floor[j] = floor;
    r.beyond_nyquist[j] = detected.exceeded_nyquist || predicted.exceeded_nyquist;
  }
  return r;
}

double stddev(const Eigen::ArrayXd& v) {
  if (v.size() < 2) return 0.0;
  return std::sqrt((v - v.mean()).square().sum() / static_cast<double>(v.size() - 1));
}

}  // namespace

void validate(const ValidationConfig& cfg) {
  if (!std::isfinite(cfg.alpha) || !(cfg.alpha > 0.0)) {
    throw ValidationError("validation alpha must be > 0");
  }
  if (cfg.trials < 1) throw ValidationError("trials must be >= 1");
  if (cfg.bits.lo < 1 || cfg.bits.hi < cfg.bits.lo || cfg.bits.hi > 24) {
    throw ValidationError("bit range must satisfy 1 <= lo <= hi <= 24");
  }
  if (!(cfg.range > 0.0) || !std::isfinite(cfg.range)) {
    throw ValidationError("quantizer range must be positive");
  }
  if (cfg.segment_len > cfg.n_samples) {
    throw ValidationError("segment length exceeds n_samples");
  }
  SynthesisSpec probe;
  probe.alpha = cfg.alpha;
  probe.n_samples = cfg.n_samples;
  probe.sample_rate_hz = cfg.sample_rate_hz;
  probe.peaks = cfg.peaks;
  validate(probe);
}

ValidationReport run_validation(const ValidationConfig& cfg) {
  validate(cfg);
  const auto trials = static_cast<std::size_t>(cfg.trials);
  std::vector<TrialResult> results(trials);
  parallel_for(trials, [&](std::size_t t) { results[t] = run_trial(cfg, t); });

  const Eigen::Index nb = cfg.bits.count();
  Eigen::ArrayXXd fc(cfg.trials, nb);
  Eigen::ArrayXXd pred(cfg.trials, nb);
  Eigen::ArrayXXd floors(cfg.trials, nb);
  Eigen::ArrayXXi beyond(cfg.trials, nb);
  ValidationReport report;
  report.config = cfg;
  report.predicted_ratio = scaling_ratio(cfg.alpha);
  double alpha_sum = 0.0;
  for (Eigen::Index t = 0; t < cfg.trials; ++t) {
    const auto& r = results[static_cast<std::size_t>(t)];
    fc.row(t) = r.cutoff_hz.transpose();
    pred.row(t) = r.predicted_hz.transpose();
    floors.row(t) = r.floor.transpose();
    beyond.row(t) = r.beyond_nyquist.cast<int>().transpose();
    alpha_sum += r.fitted_alpha;
    report.saturated_samples += r.saturated;
  }
  report.mean_fitted_alpha = alpha_sum / cfg.trials;

  for (Eigen::Index j = 0; j < nb; ++j) {
    BitCutoffStats s;
    s.bits = cfg.bits.lo + static_cast<int>(j);
    const Eigen::ArrayXd col = fc.col(j);
    s.mean_hz = col.mean();
    s.std_hz = stddev(col);
    s.predicted_hz = pred.col(j).mean();
    s.floor_mean = floors.col(j).mean();
    s.nyquist_trials = beyond.col(j).sum();
    s.excluded = s.nyquist_trials > 0;
    if (s.excluded) report.excluded_bits.push_back(s.bits);
    report.per_bit.push_back(s);
  }

  std::vector<double> all_ratios;
  for (Eigen::Index j = 0; j + 1 < nb; ++j) {
    if (report.per_bit[j].excluded || report.per_bit[j + 1].excluded) continue;
    const Eigen::ArrayXd step = fc.col(j + 1) / fc.col(j);
    StepRatio sr;
    sr.from_bits = report.per_bit[j].bits;
    sr.to_bits = report.per_bit[j + 1].bits;
    sr.mean = step.mean();
    sr.std = stddev(step);
    sr.relative_error = std::abs(sr.mean - report.predicted_ratio) / report.predicted_ratio;
    report.ratios.push_back(sr);
    all_ratios.insert(all_ratios.end(), step.data(), step.data() + step.size());
  }
  if (report.ratios.empty()) {
    throw NoMeasurableBandError(
        "no measurable band: fewer than two consecutive bit depths stay below Nyquist for "
        "alpha=" + std::to_string(cfg.alpha) + ", fs=" + std::to_string(cfg.sample_rate_hz) +
        ", range=" + std::to_string(cfg.range));
  }
  const Eigen::Map<const Eigen::ArrayXd> all(all_ratios.data(),
                                             static_cast<Eigen::Index>(all_ratios.size()));
  report.mean_ratio = all.mean();
  report.mean_ratio_std = stddev(all);
  double err_sum = 0.0;
  for (const auto& sr : report.ratios) {
    err_sum += sr.relative_error;
    report.max_error = std::max(report.max_error, sr.relative_error);
  }
  report.mean_error = err_sum / static_cast<double>(report.ratios.size());
  return report;
}

NoiseColorTable run_noise_color_sweep(const NoiseSweepConfig& cfg) {
  if (cfg.alphas.empty()) throw ValidationError("noise sweep needs at least one alpha");
  NoiseColorTable table;
  table.config = cfg;
  const NoiseTrialSetup setup{cfg.n_samples, cfg.sample_rate_hz, cfg.range};
  for (const double alpha : cfg.alphas) {
    const Eigen::ArrayXXd slopes =
        noise_slope_grid(alpha, cfg.bits, cfg.trials, cfg.master_seed, setup);
    std::optional<int> n_min;
    for (Eigen::Index j = 0; j < slopes.cols(); ++j) {
      NoiseColorRow row;
      row.alpha = alpha;
      row.report.bits = cfg.bits.lo + static_cast<int>(j);
      row.report.noise_slope = slopes.col(j).mean();
      row.report.white_threshold = cfg.white_threshold;
      row.report.is_white = std::abs(row.report.noise_slope) < cfg.white_threshold;
      row.slope_std = stddev(slopes.col(j));
      if (row.report.is_white && !n_min) n_min = row.report.bits;
      table.rows.push_back(row);
    }
    table.n_min.push_back(n_min);
  }
  return table;
}

SensitivityReport sensitivity_from(const ValidationReport& baseline,
                                   const std::vector<double>& perturbations) {
  const double alpha = baseline.config.alpha;
  SensitivityReport report;
  report.baseline = baseline;
  report.measured_ratio = baseline.mean_ratio;
  report.baseline_error =
      std::abs(scaling_ratio(alpha) - report.measured_ratio) / report.measured_ratio;
  for (const double d : perturbations) {
    if (!(alpha + d > 0.0)) {
      throw ValidationError("perturbed alpha " + std::to_string(alpha + d) + " is not positive");
    }
    SensitivityEntry e;
    e.delta_alpha = d;
    e.perturbed_alpha = alpha + d;
    e.predicted_ratio = scaling_ratio(e.perturbed_alpha);
    e.relative_error = std::abs(e.predicted_ratio - report.measured_ratio) / report.measured_ratio;
    report.entries.push_back(e);
  }
  return report;
}

SensitivityReport run_sensitivity(const ValidationConfig& cfg,
                                  const std::vector<double>& perturbations) {
  for (const double d : perturbations) {
    if (!(cfg.alpha + d > 0.0)) {
      throw ValidationError("perturbed alpha " + std::to_string(cfg.alpha + d) +
                            " is not positive");
    }
  }
  return sensitivity_from(run_validation(cfg), perturbations);
}

PeakRobustnessReport run_peak_robustness(const ValidationConfig& base,
                                         const std::vector<PeakSpec>& peaks) {
  for (const auto& p : peaks) validate(p, base.sample_rate_hz);
  ValidationConfig clean = base;
  clean.peaks.clear();
  PeakRobustnessReport report;
  report.baseline = run_validation(clean);
  for (const auto& p : peaks) {
    ValidationConfig cfg = clean;
    cfg.peaks = {p};
    report.entries.push_back({p, run_validation(cfg)});
  }
  return report;
}

std::vector<NamedBand> default_eeg_bands(double sample_rate_hz) {
  return {{"Delta", {0.5, 4.0}},
          {"Theta", {4.0, 8.0}},
          {"Alpha", {8.0, 13.0}},
          {"Beta", {13.0, 30.0}},
          {"Gamma", {30.0, 0.5 * sample_rate_hz}}};
}

BandPowerReport run_band_power(const Signal& signal, const QuantizerConfig& cfg,
                               const std::vector<NamedBand>& bands, Eigen::Index segment_len) {
  validate(signal);
  validate(cfg);
  if (bands.empty()) throw ValidationError("at least one band is required");
  const Eigen::Index seg =
      segment_len > 0 ? segment_len : std::min<Eigen::Index>(kDefaultSegmentLength, signal.size());
  const Psd original = welch_psd(signal, seg);
  const Psd quantized = welch_psd(quantize(signal, cfg), seg);

  BandPowerReport report;
  report.quantizer = cfg;
  report.sample_rate_hz = signal.sample_rate_hz;
  report.n_samples = signal.size();
  report.segment_len = seg;
  report.saturated_samples = saturation_count(signal, cfg);
  for (const auto& b : bands) {
    BandPowerRow row;
    row.band = b;
    row.power_original = band_power(original, b.band);
    row.power_quantized = band_power(quantized, b.band);
    if (!(row.power_original > 0.0)) {
      throw ValidationError("band " + b.name + " carries no power in the original signal");
    }
    row.ratio = row.power_quantized / row.power_original;
    row.preserved = row.ratio >= kPreservedLow && row.ratio <= kPreservedHigh;
    report.rows.push_back(row);
  }
  return report;
}

SignalAnalysis analyze_signal(const Signal& signal, const QuantizerConfig& cfg,
                              Eigen::Index segment_len) {
  validate(signal);
  validate(cfg);
  SignalAnalysis a;
  a.quantizer = cfg;
  a.sample_rate_hz = signal.sample_rate_hz;
  a.n_samples = signal.size();
  a.segment_len = std::min<Eigen::Index>(segment_len, signal.size());
  const Psd psd = welch_psd(signal, a.segment_len);
  a.fit = fit_slope(psd, default_fit_band(psd));
  NoiseSlopeOptions noise_opts;
  noise_opts.segment_len = a.segment_len;
  a.noise = measure_noise_slope(signal, cfg, kWhiteThreshold, noise_opts);
  a.theoretical_floor = theoretical_noise_floor(cfg, signal.sample_rate_hz);
  a.empirical_floor = empirical_noise_floor(welch_psd(quantize(signal, cfg), a.segment_len));
  if (a.fit.alpha_hat() > 0.0) {
    a.predicted = predicted_cutoff(a.fit.alpha_hat(), a.fit.s0(), signal.sample_rate_hz, cfg);
  }
  try {
    a.cutoff_theoretical = detect_cutoff(psd, a.theoretical_floor, FloorMethod::theoretical);
  } catch (const NoUsableBandError&) {
  }
  try {
    a.cutoff_empirical = detect_cutoff(psd, a.empirical_floor, FloorMethod::empirical);
  } catch (const NoUsableBandError&) {
  }
  a.saturated_samples = saturation_count(signal, cfg);
  return a;
}

}  // namespace quantband
