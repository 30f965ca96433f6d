#include "quantband/signal.hpp"

#include <cmath>
#include <string>

#include "quantband/errors.hpp"

namespace quantband {

IoError::IoError(Kind kind, std::string path, std::string message,
                 std::optional<std::uint64_t> row,
                 std::optional<std::uint64_t> byte_offset)
    : Error(path + ": " + message +
            (row ? " (line " + std::to_string(*row) + ")" : std::string()) +
            (byte_offset ? " (byte offset " + std::to_string(*byte_offset) + ")"
                         : std::string())),
      kind_(kind),
      path_(std::move(path)),
      row_(row),
      offset_(byte_offset) {}

const char* to_string(IoError::Kind kind) noexcept {
  switch (kind) {
    case IoError::Kind::unreadable: return "unreadable";
    case IoError::Kind::empty: return "empty";
    case IoError::Kind::parse: return "parse";
    case IoError::Kind::non_finite: return "non_finite";
    case IoError::Kind::truncated: return "truncated";
    case IoError::Kind::write: return "write";
  }
  return "unknown";
}

void validate(const Signal& signal) {
  if (!(signal.sample_rate_hz > 0.0) || !std::isfinite(signal.sample_rate_hz)) {
    throw ValidationError("signal sample rate must be positive and finite");
  }
  if (signal.samples.size() < 2) {
    throw ValidationError("signal must contain at least 2 samples, got " +
                          std::to_string(signal.samples.size()));
  }
  if (!signal.samples.allFinite()) {
    throw ValidationError("signal contains non-finite samples");
  }
}

Signal make_signal(Eigen::ArrayXd samples, double sample_rate_hz) {
  Signal s{std::move(samples), sample_rate_hz};
  validate(s);
  return s;
}

}  // namespace quantband
