#include "quantband/spectral.hpp"

#include <complex>
#include <string>

#include <unsupported/Eigen/FFT>

#include "quantband/errors.hpp"

namespace quantband {
namespace {

struct LineFit {
  double slope;
  double intercept;
  double rms;
};

LineFit least_squares_line(const Eigen::ArrayXd& x, const Eigen::ArrayXd& y) {
  const double mx = x.mean();
  // Shifting by y[0] first makes a constant series give an exactly zero slope.
  const Eigen::ArrayXd sy = y - y[0];
  const double my = sy.mean() + y[0];
  const Eigen::ArrayXd cx = x - mx;
  const double sxx = cx.square().sum();
  if (!(sxx > 0.0)) throw ValidationError("fit: abscissae are degenerate");
  const double slope = (cx * (sy - sy.mean())).sum() / sxx;
  const double intercept = my - slope * mx;
  const Eigen::ArrayXd resid = y - (intercept + slope * x);
  return {slope, intercept, std::sqrt(resid.square().mean())};
}

std::vector<Eigen::Index> bins_in_band(const Psd& psd, const FrequencyBand& band) {
  std::vector<Eigen::Index> idx;
  for (Eigen::Index i = 0; i < psd.size(); ++i) {
    const double f = psd.freqs_hz[i];
    if (f >= band.low_hz && f <= band.high_hz) idx.push_back(i);
  }
  return idx;
}

void check_band(const FrequencyBand& band) {
  if (!std::isfinite(band.low_hz) || !std::isfinite(band.high_hz) ||
      !(band.low_hz < band.high_hz)) {
    throw ValidationError("frequency band must satisfy low < high, got [" +
                          std::to_string(band.low_hz) + ", " + std::to_string(band.high_hz) +
                          "]");
  }
}

}  // namespace

void validate(const Psd& psd) {
  if (psd.freqs_hz.size() != psd.power.size()) {
    throw ValidationError("PSD frequency and power arrays differ in length");
  }
  if (psd.size() < 1) throw ValidationError("PSD is empty");
  if (!psd.power.allFinite() || (psd.power < 0.0).any()) {
    throw ValidationError("PSD power must be finite and non-negative");
  }
  if (!(psd.freqs_hz[0] > 0.0)) throw ValidationError("PSD grid must start above 0 Hz");
}

Psd welch_psd(const Signal& signal, Eigen::Index segment_len, double overlap_fraction) {
  validate(signal);
  if (segment_len < 8) {
    throw ValidationError("segment length must be >= 8, got " + std::to_string(segment_len));
  }
  if (!(overlap_fraction >= 0.0 && overlap_fraction < 1.0)) {
    throw ValidationError("overlap fraction must be in [0, 1)");
  }
  const Eigen::Index n = signal.size();
  if (segment_len > n) {
    throw ValidationError("signal of " + std::to_string(n) +
                          " samples is shorter than one segment (" +
                          std::to_string(segment_len) + ")");
  }
  const Eigen::Index hop = std::max<Eigen::Index>(
      1, segment_len - static_cast<Eigen::Index>(std::floor(overlap_fraction * segment_len)));
  const Eigen::Index half = segment_len / 2;

  const Eigen::ArrayXd window = hann_window(segment_len);
  const double window_power = window.square().sum();

  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<std::complex<double>> spectrum(static_cast<std::size_t>(half + 1));
  Eigen::ArrayXd segment(segment_len);
  Eigen::ArrayXd accum = Eigen::ArrayXd::Zero(half + 1);
  Eigen::Index count = 0;
  for (Eigen::Index start = 0; start + segment_len <= n; start += hop) {
    segment = signal.samples.segment(start, segment_len);
    segment -= segment.mean();
    segment *= window;
    fft.fwd(spectrum.data(), segment.data(), segment_len);
    for (Eigen::Index k = 0; k <= half; ++k) accum[k] += std::norm(spectrum[static_cast<std::size_t>(k)]);
    ++count;
  }

  const double scale = 1.0 / (static_cast<double>(count) * signal.sample_rate_hz * window_power);
  Psd psd;
  psd.sample_rate_hz = signal.sample_rate_hz;
  psd.df_hz = signal.sample_rate_hz / static_cast<double>(segment_len);
  psd.freqs_hz = Eigen::ArrayXd::LinSpaced(half, 1.0, static_cast<double>(half)) * psd.df_hz;
  psd.power = accum.segment(1, half) * scale;
  // One-sided: fold negative frequencies, except the unpaired Nyquist bin.
  const Eigen::Index paired = (segment_len % 2 == 0) ? half - 1 : half;
  psd.power.head(paired) *= 2.0;
  return psd;
}

FrequencyBand default_fit_band(const Psd& psd) {
  return {10.0 * psd.df_hz, 0.25 * psd.sample_rate_hz};
}

SpectralFit fit_slope(const Psd& psd, const FrequencyBand& band) {
  validate(psd);
  check_band(band);
  const auto idx = bins_in_band(psd, band);
  if (idx.size() < 10) {
    throw ValidationError("fit band [" + std::to_string(band.low_hz) + ", " +
                          std::to_string(band.high_hz) + "] Hz holds " +
                          std::to_string(idx.size()) + " bins; at least 10 required");
  }
  Eigen::ArrayXd x(static_cast<Eigen::Index>(idx.size()));
  Eigen::ArrayXd y(x.size());
  for (std::size_t j = 0; j < idx.size(); ++j) {
    const double p = psd.power[idx[j]];
    if (!(p > 0.0)) throw ValidationError("fit band contains zero power");
    x[static_cast<Eigen::Index>(j)] = std::log10(psd.freqs_hz[idx[j]]);
    y[static_cast<Eigen::Index>(j)] = std::log10(p);
  }
  const LineFit line = least_squares_line(x, y);
  return {line.slope, line.intercept, band, line.rms, x.size()};
}

SpectralFit fit_slope_log_binned(const Psd& psd, const FrequencyBand& band,
                                 Eigen::Index log_bins) {
  validate(psd);
  check_band(band);
  if (log_bins < 3) throw ValidationError("log-binned fit needs at least 3 bins");
  if (!(band.low_hz > 0.0)) throw ValidationError("log-binned fit band must start above 0 Hz");
  const auto idx = bins_in_band(psd, band);
  if (idx.size() < 10) {
    throw ValidationError("fit band holds " + std::to_string(idx.size()) +
                          " bins; at least 10 required");
  }
  const double lo = std::log10(psd.freqs_hz[idx.front()]);
  const double hi = std::log10(psd.freqs_hz[idx.back()]);
  const double width = (hi - lo) / static_cast<double>(log_bins);

  Eigen::ArrayXd sum_x = Eigen::ArrayXd::Zero(log_bins);
  Eigen::ArrayXd sum_y = Eigen::ArrayXd::Zero(log_bins);
  Eigen::ArrayXi counts = Eigen::ArrayXi::Zero(log_bins);
  for (const auto i : idx) {
    const double p = psd.power[i];
    if (!(p > 0.0)) throw ValidationError("fit band contains zero power");
    const double lf = std::log10(psd.freqs_hz[i]);
    const auto b = std::min<Eigen::Index>(log_bins - 1,
                                          static_cast<Eigen::Index>((lf - lo) / width));
    sum_x[b] += lf;
    sum_y[b] += std::log10(p);
    ++counts[b];
  }
  const Eigen::Index used = (counts > 0).count();
  if (used < 3) throw ValidationError("log-binned fit: fewer than 3 occupied bins");
  Eigen::ArrayXd x(used), y(used);
  for (Eigen::Index b = 0, j = 0; b < log_bins; ++b) {
    if (counts[b] == 0) continue;
    x[j] = sum_x[b] / counts[b];
    y[j] = sum_y[b] / counts[b];
    ++j;
  }
  const LineFit line = least_squares_line(x, y);
  return {line.slope, line.intercept, band, line.rms, used};
}

double empirical_noise_floor(const Psd& psd) {
  validate(psd);
  if (psd.size() < 8) {
    throw ValidationError("empirical noise floor needs at least 8 PSD bins");
  }
  const double threshold = 0.75 * psd.max_freq_hz();
  std::vector<double> upper;
  for (Eigen::Index i = 0; i < psd.size(); ++i) {
    if (psd.freqs_hz[i] >= threshold) upper.push_back(psd.power[i]);
  }
  return median(Eigen::Map<const Eigen::ArrayXd>(upper.data(),
                                                 static_cast<Eigen::Index>(upper.size())));
}

double band_power(const Psd& psd, const FrequencyBand& band) {
  validate(psd);
  check_band(band);
  const double top = psd.max_freq_hz();
  if (band.low_hz < 0.0 || band.high_hz > top * (1.0 + 1e-12)) {
    throw ValidationError("band [" + std::to_string(band.low_hz) + ", " +
                          std::to_string(band.high_hz) + "] Hz lies outside the PSD support (0, " +
                          std::to_string(top) + "]");
  }
  const auto idx = bins_in_band(psd, band);
  if (idx.size() < 2) {
    throw ValidationError("band [" + std::to_string(band.low_hz) + ", " +
                          std::to_string(band.high_hz) + "] Hz covers fewer than 2 PSD bins");
  }
  const Eigen::Index first = idx.front();
  const Eigen::Index len = static_cast<Eigen::Index>(idx.size());
  return trapezoid(psd.freqs_hz.segment(first, len), psd.power.segment(first, len));
}

}  // namespace quantband
