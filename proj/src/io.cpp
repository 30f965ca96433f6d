#include "quantband/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <fstream>
#include <sstream>
#include <vector>

#include "quantband/errors.hpp"

namespace quantband {
namespace {

using nlohmann::json;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

bool parse_double(std::string_view text, double& out) {
  text = trim(text);
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::string_view column(std::string_view line, std::size_t index, bool& found) {
  std::size_t start = 0;
  for (std::size_t c = 0; c < index; ++c) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      found = false;
      return {};
    }
    start = comma + 1;
  }
  found = true;
  const auto comma = line.find(',', start);
  return line.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                            : comma - start);
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t to_little_endian(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xFFu) << (8 * (7 - i));
    return r;
  }
  return v;
}

Signal read_csv(const SignalFileSpec& spec) {
  std::ifstream in(spec.path);
  if (!in) throw IoError(IoError::Kind::unreadable, spec.path.string(), "cannot open file");
  std::vector<double> values;
  std::string line;
  std::uint64_t row = 0;
  bool first_content_line = true;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    bool found = false;
    const std::string_view cell = column(line, spec.channel_index, found);
    double v = 0.0;
    const bool ok = found && parse_double(cell, v);
    if (!ok) {
      if (first_content_line) {
        first_content_line = false;
        continue;  // header
      }
      throw IoError(IoError::Kind::parse, spec.path.string(),
                    found ? "non-numeric value '" + std::string(trim(cell)) + "'"
                          : "missing column " + std::to_string(spec.channel_index),
                    row);
    }
    first_content_line = false;
    if (!std::isfinite(v)) {
      throw IoError(IoError::Kind::non_finite, spec.path.string(), "non-finite sample", row);
    }
    values.push_back(v);
  }
  if (in.bad()) throw IoError(IoError::Kind::unreadable, spec.path.string(), "read failure");
  if (values.empty()) throw IoError(IoError::Kind::empty, spec.path.string(), "no samples");
  return Signal{Eigen::Map<const Eigen::ArrayXd>(values.data(),
                                                 static_cast<Eigen::Index>(values.size())),
                spec.sample_rate_hz};
}

Signal read_raw(const SignalFileSpec& spec) {
  std::ifstream in(spec.path, std::ios::binary);
  if (!in) throw IoError(IoError::Kind::unreadable, spec.path.string(), "cannot open file");
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError(IoError::Kind::unreadable, spec.path.string(), "read failure");
  if (bytes.empty()) throw IoError(IoError::Kind::empty, spec.path.string(), "no samples");
  if (bytes.size() % 8 != 0) {
    throw IoError(IoError::Kind::truncated, spec.path.string(),
                  "size " + std::to_string(bytes.size()) + " is not a multiple of 8",
                  std::nullopt, bytes.size() - bytes.size() % 8);
  }
  const auto n = static_cast<Eigen::Index>(bytes.size() / 8);
  Eigen::ArrayXd samples(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    std::uint64_t word = 0;
    std::memcpy(&word, bytes.data() + 8 * i, 8);
    const double v = std::bit_cast<double>(to_little_endian(word));
    if (!std::isfinite(v)) {
      throw IoError(IoError::Kind::non_finite, spec.path.string(), "non-finite sample",
                    std::nullopt, static_cast<std::uint64_t>(8 * i));
    }
    samples[i] = v;
  }
  return Signal{std::move(samples), spec.sample_rate_hz};
}

json metadata_json(const ReportMetadata& meta, std::uint64_t master_seed, const json& config) {
  json m;
  m["tool"] = kToolName;
  m["tool_version"] = kToolVersion;
  m["command"] = meta.command;
  m["master_seed"] = master_seed;
  m["resolved_config"] = meta.resolved_config.empty() ? config : meta.resolved_config;
  m["generated_at"] = meta.generated_at.empty() ? utc_timestamp() : meta.generated_at;
  return m;
}

json validation_body(const ValidationReport& r) {
  json j;
  j["config"] = to_json(r.config);
  json bits = json::array();
  for (const auto& b : r.per_bit) {
    bits.push_back({{"bits", b.bits},
                    {"mean_hz", b.mean_hz},
                    {"std_hz", b.std_hz},
                    {"predicted_hz", b.predicted_hz},
                    {"floor_mean", b.floor_mean},
                    {"nyquist_trials", b.nyquist_trials},
                    {"excluded", b.excluded}});
  }
  j["per_bit_cutoffs"] = bits;
  json ratios = json::array();
  for (const auto& s : r.ratios) {
    ratios.push_back({{"from_bits", s.from_bits},
                      {"to_bits", s.to_bits},
                      {"mean", s.mean},
                      {"std", s.std},
                      {"relative_error", s.relative_error}});
  }
  j["ratios"] = ratios;
  j["predicted_ratio"] = r.predicted_ratio;
  j["mean_ratio"] = r.mean_ratio;
  j["mean_ratio_std"] = r.mean_ratio_std;
  j["mean_error"] = r.mean_error;
  j["max_error"] = r.max_error;
  j["excluded_bits"] = r.excluded_bits;
  j["mean_fitted_alpha"] = r.mean_fitted_alpha;
  j["saturated_samples"] = r.saturated_samples;
  return j;
}

json with_envelope(json body, const ReportMetadata& meta, std::uint64_t seed,
                   const json& config) {
  body["schema_version"] = kReportSchemaVersion;
  body["metadata"] = metadata_json(meta, seed, config);
  return body;
}

json cutoff_json(const CutoffEstimate& c) {
  return {{"f_c_hz", c.f_c_hz},
          {"floor_value", c.floor_value},
          {"floor_method", to_string(c.floor_method)},
          {"exceeded_nyquist", c.exceeded_nyquist}};
}

json fit_json(const SpectralFit& f) {
  return {{"slope", f.slope},
          {"alpha_hat", f.alpha_hat()},
          {"intercept_log10", f.intercept_log10},
          {"s0_hat", f.s0()},
          {"fit_band_hz", {f.fit_band_hz.low_hz, f.fit_band_hz.high_hz}},
          {"rms_residual", f.rms_residual},
          {"points", f.points}};
}

json band_power_config(const BandPowerReport& r) {
  json bands = json::array();
  for (const auto& row : r.rows) {
    bands.push_back({{"name", row.band.name},
                     {"f_low_hz", row.band.band.low_hz},
                     {"f_high_hz", row.band.band.high_hz}});
  }
  return {{"quantizer", to_json(r.quantizer)},
          {"sample_rate_hz", r.sample_rate_hz},
          {"n_samples", r.n_samples},
          {"segment_len", r.segment_len},
          {"bands", bands},
          {"preserved_interval", {kPreservedLow, kPreservedHigh}}};
}

json analysis_config(const SignalAnalysis& a) {
  return {{"quantizer", to_json(a.quantizer)},
          {"sample_rate_hz", a.sample_rate_hz},
          {"n_samples", a.n_samples},
          {"segment_len", a.segment_len}};
}

}  // namespace

std::string_view to_string(SignalFormat format) noexcept {
  return format == SignalFormat::csv ? "csv" : "raw_f64_le";
}

std::string_view to_string(ReportFormat format) noexcept {
  return format == ReportFormat::json ? "json" : "csv";
}

SignalFormat parse_signal_format(std::string_view text) {
  if (text == "csv") return SignalFormat::csv;
  if (text == "raw" || text == "raw_f64_le" || text == "f64") return SignalFormat::raw_f64_le;
  throw ValidationError("unknown signal format '" + std::string(text) + "'");
}

ReportFormat parse_report_format(std::string_view text) {
  if (text == "json") return ReportFormat::json;
  if (text == "csv") return ReportFormat::csv;
  throw ValidationError("unknown report format '" + std::string(text) + "'");
}

SignalFormat signal_format_for(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  return (ext == ".csv" || ext == ".txt") ? SignalFormat::csv : SignalFormat::raw_f64_le;
}

Signal read_signal(const SignalFileSpec& spec) {
  if (!(spec.sample_rate_hz > 0.0) || !std::isfinite(spec.sample_rate_hz)) {
    throw ValidationError("sample rate must be supplied and positive");
  }
  Signal s = spec.format == SignalFormat::csv ? read_csv(spec) : read_raw(spec);
  if (s.size() < 2) {
    throw IoError(IoError::Kind::empty, spec.path.string(),
                  "need at least 2 samples, found " + std::to_string(s.size()));
  }
  return s;
}

void write_signal(const Signal& signal, const SignalFileSpec& spec) {
  validate(signal);
  std::ofstream out(spec.path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(IoError::Kind::write, spec.path.string(), "cannot open for writing");
  if (spec.format == SignalFormat::csv) {
    std::string text;
    text.reserve(static_cast<std::size_t>(signal.size()) * 24);
    for (Eigen::Index i = 0; i < signal.size(); ++i) {
      text += num(signal.samples[i]);
      text += '\n';
    }
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
  } else {
    std::vector<char> bytes(static_cast<std::size_t>(signal.size()) * 8);
    for (Eigen::Index i = 0; i < signal.size(); ++i) {
      const std::uint64_t word = to_little_endian(std::bit_cast<std::uint64_t>(signal.samples[i]));
      std::memcpy(bytes.data() + 8 * i, &word, 8);
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  }
  out.flush();
  if (!out) throw IoError(IoError::Kind::write, spec.path.string(), "write failure");
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(IoError::Kind::write, path.string(), "cannot open for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  out.flush();
  if (!out) throw IoError(IoError::Kind::write, path.string(), "write failure");
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json to_json(const PeakSpec& p) {
  return {{"center_hz", p.center_hz},
          {"width_hz", p.width_hz},
          {"amplitude_factor", p.amplitude_factor}};
}

json to_json(const QuantizerConfig& cfg) {
  return {{"bits", cfg.bits}, {"range", cfg.range}, {"step", cfg.step()}};
}

json to_json(const ValidationConfig& cfg) {
  json peaks = json::array();
  for (const auto& p : cfg.peaks) peaks.push_back(to_json(p));
  return {{"alpha", cfg.alpha},
          {"sample_rate_hz", cfg.sample_rate_hz},
          {"n_samples", cfg.n_samples},
          {"bit_range", {cfg.bits.lo, cfg.bits.hi}},
          {"trials", cfg.trials},
          {"master_seed", cfg.master_seed},
          {"floor_method", to_string(cfg.floor_method)},
          {"range", cfg.range},
          {"segment_len", cfg.segment_len},
          {"peaks", peaks}};
}

json to_json(const NoiseSweepConfig& cfg) {
  return {{"alphas", cfg.alphas},
          {"bit_range", {cfg.bits.lo, cfg.bits.hi}},
          {"trials", cfg.trials},
          {"n_samples", cfg.n_samples},
          {"sample_rate_hz", cfg.sample_rate_hz},
          {"master_seed", cfg.master_seed},
          {"range", cfg.range},
          {"white_threshold", cfg.white_threshold}};
}

json report_json(const ValidationReport& report, const ReportMetadata& meta) {
  return with_envelope(validation_body(report), meta, report.config.master_seed,
                       to_json(report.config));
}

json report_json(const NoiseColorTable& table, const ReportMetadata& meta) {
  json j;
  j["config"] = to_json(table.config);
  json rows = json::array();
  for (const auto& r : table.rows) {
    rows.push_back({{"alpha", r.alpha},
                    {"bits", r.report.bits},
                    {"noise_slope", r.report.noise_slope},
                    {"slope_std", r.slope_std},
                    {"is_white", r.report.is_white}});
  }
  j["rows"] = rows;
  json nmin = json::array();
  for (std::size_t i = 0; i < table.config.alphas.size(); ++i) {
    const auto& v = table.n_min[i];
    nmin.push_back({{"alpha", table.config.alphas[i]},
                    {"n_min", v ? json(*v) : json(nullptr)}});
  }
  j["n_min"] = nmin;
  return with_envelope(std::move(j), meta, table.config.master_seed, to_json(table.config));
}

json report_json(const SensitivityReport& report, const ReportMetadata& meta) {
  json j;
  j["config"] = to_json(report.baseline.config);
  j["baseline"] = validation_body(report.baseline);
  j["measured_ratio"] = report.measured_ratio;
  j["baseline_error"] = report.baseline_error;
  json entries = json::array();
  for (const auto& e : report.entries) {
    entries.push_back({{"delta_alpha", e.delta_alpha},
                       {"perturbed_alpha", e.perturbed_alpha},
                       {"predicted_ratio", e.predicted_ratio},
                       {"relative_error", e.relative_error}});
  }
  j["entries"] = entries;
  return with_envelope(std::move(j), meta, report.baseline.config.master_seed,
                       to_json(report.baseline.config));
}

json report_json(const PeakRobustnessReport& report, const ReportMetadata& meta) {
  json j;
  j["config"] = to_json(report.baseline.config);
  j["baseline"] = validation_body(report.baseline);
  json entries = json::array();
  for (const auto& e : report.entries) {
    entries.push_back({{"peak", to_json(e.peak)},
                       {"mean_error", e.report.mean_error},
                       {"mean_ratio", e.report.mean_ratio},
                       {"error_change", e.report.mean_error - report.baseline.mean_error},
                       {"validation", validation_body(e.report)}});
  }
  j["entries"] = entries;
  return with_envelope(std::move(j), meta, report.baseline.config.master_seed,
                       to_json(report.baseline.config));
}

json report_json(const BandPowerReport& report, const ReportMetadata& meta) {
  json j;
  j["config"] = band_power_config(report);
  json rows = json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"band", r.band.name},
                    {"f_low_hz", r.band.band.low_hz},
                    {"f_high_hz", r.band.band.high_hz},
                    {"power_original", r.power_original},
                    {"power_quantized", r.power_quantized},
                    {"ratio", r.ratio},
                    {"preserved", r.preserved}});
  }
  j["bands"] = rows;
  j["saturated_samples"] = report.saturated_samples;
  const std::uint64_t seed = meta.resolved_config.contains("seed")
                                 ? meta.resolved_config["seed"].get<std::uint64_t>()
                                 : 0;
  return with_envelope(std::move(j), meta, seed, band_power_config(report));
}

json report_json(const SignalAnalysis& a, const ReportMetadata& meta) {
  json j;
  j["config"] = analysis_config(a);
  j["fit"] = fit_json(a.fit);
  j["noise"] = {{"bits", a.noise.bits},
                {"noise_slope", a.noise.noise_slope},
                {"white_threshold", a.noise.white_threshold},
                {"is_white", a.noise.is_white},
                {"character", a.noise.is_white ? "white" : "colored"}};
  j["theoretical_floor"] = a.theoretical_floor;
  j["empirical_floor"] = a.empirical_floor;
  j["predicted_cutoff"] = cutoff_json(a.predicted);
  j["cutoff_theoretical"] = a.cutoff_theoretical ? cutoff_json(*a.cutoff_theoretical) : json(nullptr);
  j["cutoff_empirical"] = a.cutoff_empirical ? cutoff_json(*a.cutoff_empirical) : json(nullptr);
  j["nyquist_hz"] = 0.5 * a.sample_rate_hz;
  j["saturated_samples"] = a.saturated_samples;
  const std::uint64_t seed = meta.resolved_config.contains("seed")
                                 ? meta.resolved_config["seed"].get<std::uint64_t>()
                                 : 0;
  return with_envelope(std::move(j), meta, seed, analysis_config(a));
}

std::string report_csv(const ValidationReport& r) {
  std::ostringstream out;
  out << "alpha,bits,fc_mean_hz,fc_std_hz,fc_predicted_hz,floor_mean,excluded\n";
  for (const auto& b : r.per_bit) {
    out << num(r.config.alpha) << ',' << b.bits << ',' << num(b.mean_hz) << ',' << num(b.std_hz)
        << ',' << num(b.predicted_hz) << ',' << num(b.floor_mean) << ','
        << (b.excluded ? "true" : "false") << '\n';
  }
  return out.str();
}

std::string report_csv(const NoiseColorTable& t) {
  std::ostringstream out;
  out << "alpha,bits,noise_slope,is_white\n";
  for (const auto& r : t.rows) {
    out << num(r.alpha) << ',' << r.report.bits << ',' << num(r.report.noise_slope) << ','
        << (r.report.is_white ? "true" : "false") << '\n';
  }
  return out.str();
}

std::string report_csv(const SensitivityReport& r) {
  std::ostringstream out;
  out << "alpha,delta_alpha,perturbed_alpha,predicted_ratio,measured_ratio,relative_error\n";
  for (const auto& e : r.entries) {
    out << num(r.baseline.config.alpha) << ',' << num(e.delta_alpha) << ','
        << num(e.perturbed_alpha) << ',' << num(e.predicted_ratio) << ','
        << num(r.measured_ratio) << ',' << num(e.relative_error) << '\n';
  }
  return out.str();
}

std::string report_csv(const PeakRobustnessReport& r) {
  std::ostringstream out;
  out << "center_hz,width_hz,amplitude_factor,mean_ratio,mean_error,baseline_error\n";
  for (const auto& e : r.entries) {
    out << num(e.peak.center_hz) << ',' << num(e.peak.width_hz) << ','
        << num(e.peak.amplitude_factor) << ',' << num(e.report.mean_ratio) << ','
        << num(e.report.mean_error) << ',' << num(r.baseline.mean_error) << '\n';
  }
  return out.str();
}

std::string report_csv(const BandPowerReport& r) {
  std::ostringstream out;
  out << "band,f_low_hz,f_high_hz,power_original,power_quantized,ratio,preserved\n";
  for (const auto& row : r.rows) {
    out << row.band.name << ',' << num(row.band.band.low_hz) << ','
        << num(row.band.band.high_hz) << ',' << num(row.power_original) << ','
        << num(row.power_quantized) << ',' << num(row.ratio) << ','
        << (row.preserved ? "true" : "false") << '\n';
  }
  return out.str();
}

std::string report_csv(const SignalAnalysis& a) {
  std::ostringstream out;
  out << "key,value\n";
  out << "bits," << a.quantizer.bits << '\n';
  out << "range," << num(a.quantizer.range) << '\n';
  out << "alpha_hat," << num(a.fit.alpha_hat()) << '\n';
  out << "s0_hat," << num(a.fit.s0()) << '\n';
  out << "noise_slope," << num(a.noise.noise_slope) << '\n';
  out << "noise_is_white," << (a.noise.is_white ? "true" : "false") << '\n';
  out << "theoretical_floor," << num(a.theoretical_floor) << '\n';
  out << "empirical_floor," << num(a.empirical_floor) << '\n';
  out << "predicted_fc_hz," << num(a.predicted.f_c_hz) << '\n';
  if (a.cutoff_theoretical) {
    out << "fc_theoretical_hz," << num(a.cutoff_theoretical->f_c_hz) << '\n';
    out << "fc_theoretical_exceeded_nyquist,"
        << (a.cutoff_theoretical->exceeded_nyquist ? "true" : "false") << '\n';
  }
  if (a.cutoff_empirical) {
    out << "fc_empirical_hz," << num(a.cutoff_empirical->f_c_hz) << '\n';
    out << "fc_empirical_exceeded_nyquist,"
        << (a.cutoff_empirical->exceeded_nyquist ? "true" : "false") << '\n';
  }
  out << "saturated_samples," << a.saturated_samples << '\n';
  return out.str();
}

}  // namespace quantband
