#pragma once

#include <cmath>
#include <cstdint>

#include <Eigen/Core>

#include "quantband/signal.hpp"

namespace quantband {

/// Uniform mid-rise quantizer over [-range/2, range/2] with 2^bits levels.
struct QuantizerConfig {
  int bits = 8;
  double range = 2.0;

  double step() const noexcept { return range / std::ldexp(1.0, bits); }
  std::int64_t levels() const noexcept { return std::int64_t{1} << bits; }
};

void validate(const QuantizerConfig& cfg);

/// Nearest reconstruction level (k + 1/2) * step, saturating at the outermost level.
template <typename Scalar>
Scalar quantize_value(Scalar x, const QuantizerConfig& cfg) {
  const Scalar step = static_cast<Scalar>(cfg.step());
  const Scalar half_levels = static_cast<Scalar>(std::int64_t{1} << (cfg.bits - 1));
  Scalar k = std::floor(x / step);
  if (k < -half_levels) k = -half_levels;
  if (k > half_levels - 1) k = half_levels - 1;
  return (k + Scalar(0.5)) * step;
}

/// Elementwise quantization of any Eigen array expression.
template <typename Derived>
Eigen::Array<typename Derived::Scalar, Eigen::Dynamic, 1> quantize(
    const Eigen::ArrayBase<Derived>& x, const QuantizerConfig& cfg) {
  using Scalar = typename Derived::Scalar;
  return x.derived().unaryExpr([&cfg](Scalar v) { return quantize_value(v, cfg); });
}

Signal quantize(const Signal& signal, const QuantizerConfig& cfg);

/// Number of samples outside [-range/2, range/2].
std::int64_t saturation_count(const Signal& signal, const QuantizerConfig& cfg);

/// e[n] = quantized[n] - original[n].
Signal error_signal(const Signal& original, const Signal& quantized);

/// One-sided white-noise floor step^2 / (6 fs), in the units of welch_psd.
double theoretical_noise_floor(const QuantizerConfig& cfg, double sample_rate_hz);

}  // namespace quantband
