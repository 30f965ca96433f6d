#include "quantband/quantizer.hpp"

#include <string>

#include "quantband/errors.hpp"

namespace quantband {

void validate(const QuantizerConfig& cfg) {
  if (cfg.bits < 1 || cfg.bits > 24) {
    throw ValidationError("bit depth must be in [1, 24], got " + std::to_string(cfg.bits));
  }
  if (!std::isfinite(cfg.range) || !(cfg.range > 0.0)) {
    throw ValidationError("quantizer range must be positive and finite");
  }
  const double step = cfg.step();
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw ValidationError("quantizer step is not representable");
  }
}

Signal quantize(const Signal& signal, const QuantizerConfig& cfg) {
  validate(cfg);
  validate(signal);
  return Signal{quantize(signal.samples, cfg), signal.sample_rate_hz};
}

std::int64_t saturation_count(const Signal& signal, const QuantizerConfig& cfg) {
  validate(cfg);
  const double half = 0.5 * cfg.range;
  return (signal.samples.abs() > half).count();
}

Signal error_signal(const Signal& original, const Signal& quantized) {
  if (original.size() != quantized.size()) {
    throw ValidationError("error_signal: length mismatch (" +
                          std::to_string(original.size()) + " vs " +
                          std::to_string(quantized.size()) + ")");
  }
  if (original.sample_rate_hz != quantized.sample_rate_hz) {
    throw ValidationError("error_signal: sample rate mismatch");
  }
  return Signal{quantized.samples - original.samples, original.sample_rate_hz};
}

double theoretical_noise_floor(const QuantizerConfig& cfg, double sample_rate_hz) {
  validate(cfg);
  if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz)) {
    throw ValidationError("sample rate must be positive and finite");
  }
  const double step = cfg.step();
  return step * step / (6.0 * sample_rate_hz);
}

}  // namespace quantband
