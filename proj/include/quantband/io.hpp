#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"

#include "quantband/experiments.hpp"
#include "quantband/signal.hpp"

namespace quantband {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr std::string_view kToolName = "quantband";
inline constexpr std::string_view kToolVersion = "1.0.0";

enum class SignalFormat { csv, raw_f64_le };
enum class ReportFormat { json, csv };

std::string_view to_string(SignalFormat format) noexcept;
std::string_view to_string(ReportFormat format) noexcept;
SignalFormat parse_signal_format(std::string_view text);
ReportFormat parse_report_format(std::string_view text);
/// ".csv" and ".txt" map to csv; anything else is raw little-endian doubles.
SignalFormat signal_format_for(const std::filesystem::path& path);

struct SignalFileSpec {
  std::filesystem::path path;
  SignalFormat format = SignalFormat::raw_f64_le;
  /// Always supplied by the caller; neither format stores it.
  double sample_rate_hz = 0.0;
  /// Column for multi-column CSV.
  std::size_t channel_index = 0;
};

/// CSV: one sample per line (or one column of a comma-separated table), with an
/// optional single header line detected by a failed numeric parse on line 1.
/// raw_f64_le: IEEE-754 little-endian doubles, no header.
Signal read_signal(const SignalFileSpec& spec);

/// CSV output uses 17 significant digits, so values round-trip to within 1e-12.
void write_signal(const Signal& signal, const SignalFileSpec& spec);

/// Provenance block stored in every JSON report.
struct ReportMetadata {
  std::string command;
  /// Full resolved run configuration (flags, preset, defaults).
  nlohmann::json resolved_config = nlohmann::json::object();
  /// ISO-8601 UTC; the only field allowed to differ between identical runs.
  std::string generated_at;
};

/// Current UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_timestamp();

nlohmann::json to_json(const ValidationConfig& cfg);
nlohmann::json to_json(const NoiseSweepConfig& cfg);
nlohmann::json to_json(const PeakSpec& peak);
nlohmann::json to_json(const QuantizerConfig& cfg);

nlohmann::json report_json(const ValidationReport& report, const ReportMetadata& meta = {});
nlohmann::json report_json(const NoiseColorTable& table, const ReportMetadata& meta = {});
nlohmann::json report_json(const SensitivityReport& report, const ReportMetadata& meta = {});
nlohmann::json report_json(const PeakRobustnessReport& report, const ReportMetadata& meta = {});
nlohmann::json report_json(const BandPowerReport& report, const ReportMetadata& meta = {});
nlohmann::json report_json(const SignalAnalysis& report, const ReportMetadata& meta = {});

/// Primary numeric table of each report, header line first.
std::string report_csv(const ValidationReport& report);
std::string report_csv(const NoiseColorTable& table);
std::string report_csv(const SensitivityReport& report);
std::string report_csv(const PeakRobustnessReport& report);
std::string report_csv(const BandPowerReport& report);
std::string report_csv(const SignalAnalysis& report);

template <typename Report>
void write_report(const Report& report, const std::filesystem::path& path, ReportFormat format,
                  const ReportMetadata& meta = {});

void write_text_file(const std::filesystem::path& path, std::string_view contents);

template <typename Report>
void write_report(const Report& report, const std::filesystem::path& path, ReportFormat format,
                  const ReportMetadata& meta) {
  if (format == ReportFormat::json) {
    write_text_file(path, report_json(report, meta).dump(2) + "\n");
  } else {
    write_text_file(path, report_csv(report));
  }
}

}  // namespace quantband
