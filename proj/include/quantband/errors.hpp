#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace quantband {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A configuration or input value violates a documented precondition.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// The noise floor lies above the whole spectrum; no band survives quantization.
class NoUsableBandError : public Error {
 public:
  using Error::Error;
};

/// Every configured bit depth was excluded, so no cutoff ratio can be measured.
class NoMeasurableBandError : public Error {
 public:
  using Error::Error;
};

/// File ingestion or emission failure, with the location that caused it.
class IoError : public Error {
 public:
  enum class Kind { unreadable, empty, parse, non_finite, truncated, write };

  IoError(Kind kind, std::string path, std::string message,
          std::optional<std::uint64_t> row = std::nullopt,
          std::optional<std::uint64_t> byte_offset = std::nullopt);

  Kind kind() const noexcept { return kind_; }
  const std::string& path() const noexcept { return path_; }
  /// 1-based line number for text formats.
  std::optional<std::uint64_t> row() const noexcept { return row_; }
  std::optional<std::uint64_t> byte_offset() const noexcept { return offset_; }

 private:
  Kind kind_;
  std::string path_;
  std::optional<std::uint64_t> row_;
  std::optional<std::uint64_t> offset_;
};

const char* to_string(IoError::Kind kind) noexcept;

}  // namespace quantband
