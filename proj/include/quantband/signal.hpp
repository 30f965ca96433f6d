#pragma once

#include <Eigen/Core>

namespace quantband {

/// Uniformly sampled real time series.
struct Signal {
  Eigen::ArrayXd samples;
  double sample_rate_hz = 0.0;

  Eigen::Index size() const noexcept { return samples.size(); }
  double nyquist_hz() const noexcept { return 0.5 * sample_rate_hz; }
  double duration_s() const noexcept {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }
};

/// Throws ValidationError unless the signal has >= 2 finite samples and a positive rate.
void validate(const Signal& signal);

/// Builds a validated signal.
Signal make_signal(Eigen::ArrayXd samples, double sample_rate_hz);

}  // namespace quantband
