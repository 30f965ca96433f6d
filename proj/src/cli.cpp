#include "quantband/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "quantband/errors.hpp"
#include "quantband/io.hpp"

namespace quantband {
namespace {

using nlohmann::json;

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

template <typename T>
T parse_number(std::string_view text, std::string_view what) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw ValidationError("invalid " + std::string(what) + " '" + std::string(text) + "'");
  }
  return value;
}

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

struct GlobalOptions {
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "json";
  bool quiet = false;
};

// Where the report goes and what gets printed around it.
class Emitter {
 public:
  Emitter(const GlobalOptions& g, std::ostream& out, std::ostream& err)
      : g_(g), out_(out), err_(err) {}

  template <typename Report>
  void emit(const Report& report, const ReportMetadata& meta, const std::string& summary) {
    const ReportFormat format = parse_report_format(g_.format);
    if (g_.out.empty()) {
      if (format == ReportFormat::json) {
        out_ << report_json(report, meta).dump(2) << '\n';
      } else {
        out_ << report_csv(report);
      }
      if (!g_.quiet) err_ << summary << '\n';
      return;
    }
    write_report(report, g_.out, format, meta);
    if (g_.quiet) {
      out_ << g_.out << '\n';
    } else {
      out_ << summary << '\n' << "report: " << g_.out << '\n';
    }
  }

 private:
  const GlobalOptions& g_;
  std::ostream& out_;
  std::ostream& err_;
};

// Experiment flags shared by validate, sensitivity and peaks.
struct ValidationFlags {
  std::string preset;
  double alpha = 0.0;
  double fs = 0.0;
  Eigen::Index n = 0;
  std::string bits;
  int trials = 0;
  std::string floor;
  double range = 0.0;
  Eigen::Index segment = 0;
  std::vector<std::string> peaks;

  CLI::Option* alpha_opt = nullptr;
  CLI::Option* fs_opt = nullptr;
  CLI::Option* n_opt = nullptr;
  CLI::Option* bits_opt = nullptr;
  CLI::Option* trials_opt = nullptr;
  CLI::Option* floor_opt = nullptr;
  CLI::Option* range_opt = nullptr;
  CLI::Option* segment_opt = nullptr;

  void attach(CLI::App* cmd, bool with_peaks) {
    cmd->add_option("--preset", preset,
                    "paper-alpha15 | paper-alpha20 | paper-alpha25");
    alpha_opt = cmd->add_option("--alpha", alpha, "spectral exponent");
    fs_opt = cmd->add_option("--fs", fs, "sample rate (Hz)");
    n_opt = cmd->add_option("--n", n, "samples per trial");
    bits_opt = cmd->add_option("--bits", bits, "bit-depth range lo:hi");
    trials_opt = cmd->add_option("--trials", trials, "Monte Carlo trials");
    floor_opt = cmd->add_option("--floor", floor, "theoretical | empirical");
    range_opt = cmd->add_option("--range", range, "quantizer full-scale range R");
    segment_opt = cmd->add_option("--segment", segment, "Welch segment length");
    if (with_peaks) {
      cmd->add_option("--peak", peaks, "add a spectral peak center:width:amplitude");
    }
  }

  ValidationConfig resolve(std::uint64_t seed, std::string_view default_preset) const {
    ValidationConfig cfg = validation_preset(preset.empty() ? default_preset : preset);
    if (alpha_opt->count()) cfg.alpha = alpha;
    if (fs_opt->count()) cfg.sample_rate_hz = fs;
    if (n_opt->count()) cfg.n_samples = n;
    if (bits_opt->count()) cfg.bits = parse_bit_range(bits);
    if (trials_opt->count()) cfg.trials = trials;
    if (floor_opt->count()) cfg.floor_method = parse_floor_method(floor);
    if (range_opt->count()) cfg.range = range;
    if (segment_opt->count()) cfg.segment_len = segment;
    for (const auto& p : peaks) cfg.peaks.push_back(parse_peak(p));
    cfg.master_seed = seed;
    validate(cfg);
    return cfg;
  }
};

std::string excluded_text(const std::vector<int>& bits) {
  if (bits.empty()) return "none";
  std::string s;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(bits[i]);
  }
  return s;
}

std::string validation_summary(const ValidationReport& r) {
  return "alpha=" + fmt("%g", r.config.alpha) + " bits " + std::to_string(r.config.bits.lo) +
         "-" + std::to_string(r.config.bits.hi) + " floor=" +
         std::string(to_string(r.config.floor_method)) + ": mean ratio " +
         fmt("%.3f", r.mean_ratio) + " +/- " + fmt("%.3f", r.mean_ratio_std) + " (predicted " +
         fmt("%.3f", r.predicted_ratio) + "), mean error " + fmt("%.2f", 100.0 * r.mean_error) +
         "%, excluded bits: " + excluded_text(r.excluded_bits);
}

Signal load_signal(const std::string& path, const std::string& format, double fs,
                   std::size_t channel) {
  SignalFileSpec spec;
  spec.path = path;
  spec.format = format.empty() ? signal_format_for(spec.path) : parse_signal_format(format);
  spec.sample_rate_hz = fs;
  spec.channel_index = channel;
  return read_signal(spec);
}

double default_range(const Signal& s) {
  const double peak = s.samples.abs().maxCoeff();
  if (!(peak > 0.0)) throw ValidationError("signal is identically zero; pass --range");
  return 2.0 * peak;
}

}  // namespace

ValidationConfig validation_preset(std::string_view name) {
  ValidationConfig cfg;
  cfg.n_samples = 100000;
  cfg.trials = 20;
  if (name == kPresetAlpha15) {
    cfg.alpha = 1.5;
    cfg.sample_rate_hz = 200000.0;
    cfg.bits = {5, 6};
    cfg.range = 6.0;
    cfg.segment_len = 1024;
  } else if (name == kPresetAlpha20) {
    cfg.alpha = 2.0;
    cfg.sample_rate_hz = 20000.0;
    cfg.bits = {7, 12};
    cfg.range = 64.0;
  } else if (name == kPresetAlpha25) {
    cfg.alpha = 2.5;
    cfg.sample_rate_hz = 20000.0;
    cfg.bits = {7, 12};
    cfg.range = 8.0;
  } else {
    throw ValidationError("unknown validation preset '" + std::string(name) + "'");
  }
  return cfg;
}

NoiseSweepConfig noise_preset(std::string_view name) {
  if (name != kPresetTable2) {
    throw ValidationError("unknown noise-color preset '" + std::string(name) + "'");
  }
  NoiseSweepConfig cfg;
  cfg.alphas = {2.0};
  cfg.bits = {4, 8};
  cfg.trials = 20;
  cfg.n_samples = 100000;
  cfg.sample_rate_hz = 2000.0;
  return cfg;
}

PeakSpec parse_peak(std::string_view text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) {
    throw ValidationError("peak must be center:width:amplitude, got '" + std::string(text) + "'");
  }
  return PeakSpec{parse_number<double>(parts[0], "peak center"),
                  parse_number<double>(parts[1], "peak width"),
                  parse_number<double>(parts[2], "peak amplitude")};
}

BitRange parse_bit_range(std::string_view text) {
  const auto parts = split(text, ':');
  BitRange r;
  if (parts.size() == 1) {
    r.lo = r.hi = parse_number<int>(parts[0], "bit depth");
  } else if (parts.size() == 2) {
    r.lo = parse_number<int>(parts[0], "bit depth");
    r.hi = parse_number<int>(parts[1], "bit depth");
  } else {
    throw ValidationError("bit range must be lo:hi, got '" + std::string(text) + "'");
  }
  if (r.lo < 1 || r.hi > 24 || r.lo > r.hi) {
    throw ValidationError("bit range must satisfy 1 <= lo <= hi <= 24");
  }
  return r;
}

NamedBand parse_band(std::string_view text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3 || parts[0].empty()) {
    throw ValidationError("band must be name:lo:hi, got '" + std::string(text) + "'");
  }
  NamedBand b{std::string(parts[0]),
              {parse_number<double>(parts[1], "band edge"), parse_number<double>(parts[2], "band edge")}};
  if (!(b.band.low_hz >= 0.0) || !(b.band.high_hz > b.band.low_hz)) {
    throw ValidationError("band '" + b.name + "' needs 0 <= lo < hi");
  }
  return b;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantization bandwidth scaling for 1/f^alpha signals", "quantband"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(kToolVersion));

  GlobalOptions g;
  app.add_option("--seed", g.seed, "master seed")->capture_default_str();
  app.add_option("--out", g.out, "output path (report or signal); stdout when omitted");
  app.add_option("--format", g.format, "report format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  app.add_flag("--quiet", g.quiet, "print only the output path");

  // synth
  auto* synth = app.add_subcommand("synth", "write a synthetic 1/f^alpha signal");
  double s_alpha = 0.0, s_fs = 2000.0;
  Eigen::Index s_n = 100000;
  std::vector<std::string> s_peaks;
  std::string s_signal_format;
  synth->add_option("--alpha", s_alpha, "spectral exponent")->required();
  synth->add_option("--n", s_n, "number of samples")->capture_default_str();
  synth->add_option("--fs", s_fs, "sample rate (Hz)")->capture_default_str();
  synth->add_option("--peak", s_peaks,
                    "add a Gaussian peak center:width:amplitude (Hz, Hz, x local level)");
  synth->add_option("--signal-format", s_signal_format,
                    "csv | raw (default from the --out extension)");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "quantize a signal and locate its cutoff");
  std::string a_in, a_signal_format;
  double a_fs = 0.0, a_range = 0.0;
  int a_bits = 8;
  std::size_t a_channel = 0;
  Eigen::Index a_segment = kDefaultSegmentLength;
  analyze->add_option("--in", a_in, "input signal file")->required();
  analyze->add_option("--fs", a_fs, "sample rate (Hz)")->required();
  analyze->add_option("--bits", a_bits, "bit depth")->capture_default_str();
  auto* a_range_opt = analyze->add_option("--range", a_range, "full-scale range (default 2 max|x|)");
  analyze->add_option("--channel", a_channel, "CSV column")->capture_default_str();
  analyze->add_option("--segment", a_segment, "Welch segment length")->capture_default_str();
  analyze->add_option("--signal-format", a_signal_format, "csv | raw");

  // validate
  auto* validate_cmd = app.add_subcommand("validate", "Monte Carlo check of the per-bit cutoff ratio");
  ValidationFlags v_flags;
  v_flags.attach(validate_cmd, true);

  // noise-color
  auto* noise = app.add_subcommand("noise-color", "quantization-noise slope per alpha and bit depth");
  std::string n_preset, n_bits;
  std::vector<double> n_alphas;
  int n_trials = 0;
  Eigen::Index n_n = 0;
  double n_fs = 0.0, n_range = 0.0, n_threshold = 0.0;
  noise->add_option("--preset", n_preset, "paper-table2");
  auto* n_alpha_opt = noise->add_option("--alpha", n_alphas, "spectral exponents");
  auto* n_bits_opt = noise->add_option("--bits", n_bits, "bit-depth range lo:hi");
  auto* n_trials_opt = noise->add_option("--trials", n_trials, "trials per cell");
  auto* n_n_opt = noise->add_option("--n", n_n, "samples per trial");
  auto* n_fs_opt = noise->add_option("--fs", n_fs, "sample rate (Hz)");
  auto* n_range_opt = noise->add_option("--range", n_range, "full-scale range");
  auto* n_thr_opt = noise->add_option("--threshold", n_threshold, "whiteness threshold on |slope|");

  // sensitivity
  auto* sens = app.add_subcommand("sensitivity", "prediction error under a misestimated alpha");
  ValidationFlags se_flags;
  se_flags.attach(sens, false);
  std::vector<double> se_deltas{-0.3, -0.2, -0.1, 0.1, 0.2, 0.3};
  sens->add_option("--delta", se_deltas, "alpha perturbations")->capture_default_str();

  // peaks
  auto* peaks = app.add_subcommand("peaks", "validation error with injected spectral peaks");
  ValidationFlags p_flags;
  p_flags.attach(peaks, false);
  std::vector<std::string> p_peaks{"10:2:50", "100:5:50"};
  peaks->add_option("--peak", p_peaks, "peaks tested one at a time, center:width:amplitude")
      ->capture_default_str();

  // bands
  auto* bands = app.add_subcommand("bands", "band-power preservation after quantization");
  std::string b_in, b_signal_format;
  double b_fs = 160.0, b_alpha = 1.56, b_range = 0.0;
  Eigen::Index b_n = 16384, b_segment = 0;
  int b_bits = 6;
  std::size_t b_channel = 0;
  std::vector<std::string> b_bands;
  auto* b_in_opt = bands->add_option("--in", b_in, "input signal file");
  bands->add_option("--fs", b_fs, "sample rate (Hz)")->capture_default_str();
  auto* b_alpha_opt = bands->add_option("--alpha", b_alpha, "synthetic signal exponent")
                          ->capture_default_str();
  bands->add_option("--n", b_n, "synthetic signal length")->capture_default_str();
  bands->add_option("--bits", b_bits, "bit depth")->capture_default_str();
  auto* b_range_opt = bands->add_option("--range", b_range, "full-scale range (default 2 max|x|)");
  bands->add_option("--segment", b_segment, "Welch segment length (default min(4096, n))");
  bands->add_option("--channel", b_channel, "CSV column")->capture_default_str();
  bands->add_option("--band", b_bands, "custom band name:lo:hi (replaces the EEG bands)");
  bands->add_option("--signal-format", b_signal_format, "csv | raw");
  b_alpha_opt->excludes(b_in_opt);

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  Emitter emitter(g, out, err);
  auto meta_for = [&](std::string command, json config) {
    json resolved = {{"command", command}, {"seed", g.seed}, {"format", g.format},
                     {"options", std::move(config)}};
    return ReportMetadata{std::move(command), std::move(resolved), utc_timestamp()};
  };

  try {
    if (*synth) {
      if (g.out.empty()) throw ValidationError("synth needs --out");
      SynthesisSpec spec;
      spec.alpha = s_alpha;
      spec.n_samples = s_n;
      spec.sample_rate_hz = s_fs;
      spec.seed = g.seed;
      for (const auto& p : s_peaks) spec.peaks.push_back(parse_peak(p));
      validate(spec);
      const Signal x = synthesize(spec);
      SignalFileSpec file;
      file.path = g.out;
      file.format = s_signal_format.empty() ? signal_format_for(file.path)
                                            : parse_signal_format(s_signal_format);
      file.sample_rate_hz = s_fs;
      write_signal(x, file);
      if (g.quiet) {
        out << g.out << '\n';
      } else {
        out << "synth: " << x.size() << " samples, alpha=" << s_alpha << ", fs=" << s_fs
            << " Hz, seed=" << g.seed << ", format=" << to_string(file.format) << '\n'
            << "signal: " << g.out << '\n';
      }
      return kExitOk;
    }

    if (*analyze) {
      const Signal x = load_signal(a_in, a_signal_format, a_fs, a_channel);
      const QuantizerConfig q{a_bits, a_range_opt->count() ? a_range : default_range(x)};
      validate(q);
      const Eigen::Index seg = std::min<Eigen::Index>(a_segment, x.size());
      const SignalAnalysis a = analyze_signal(x, q, seg);
      json cfg = {{"in", a_in}, {"fs", a_fs}, {"bits", q.bits}, {"range", q.range},
                  {"channel", a_channel}, {"segment", seg}};
      std::string summary = "analyze bits=" + std::to_string(q.bits) + ": alpha_hat=" +
                            fmt("%.3f", a.fit.alpha_hat()) + ", noise " +
                            (a.noise.is_white ? "white" : "colored") + " (slope " +
                            fmt("%.3f", a.noise.noise_slope) + "), predicted f_c " +
                            fmt("%.4g", a.predicted.f_c_hz) + " Hz";
      if (a.cutoff_theoretical) {
        summary += ", detected f_c " + fmt("%.4g", a.cutoff_theoretical->f_c_hz) + " Hz";
        if (a.cutoff_theoretical->exceeded_nyquist) summary += " (beyond Nyquist)";
      } else {
        summary += ", no usable band";
      }
      emitter.emit(a, meta_for("analyze", cfg), summary);
      return kExitOk;
    }

    if (*validate_cmd) {
      const ValidationConfig cfg = v_flags.resolve(g.seed, kPresetAlpha15);
      const ValidationReport r = run_validation(cfg);
      json opts = to_json(cfg);
      opts["preset"] = v_flags.preset.empty() ? std::string(kPresetAlpha15) : v_flags.preset;
      emitter.emit(r, meta_for("validate", opts), "validate " + validation_summary(r));
      return kExitOk;
    }

    if (*noise) {
      NoiseSweepConfig cfg = n_preset.empty() ? NoiseSweepConfig{} : noise_preset(n_preset);
      if (n_alpha_opt->count()) cfg.alphas = n_alphas;
      if (n_bits_opt->count()) cfg.bits = parse_bit_range(n_bits);
      if (n_trials_opt->count()) cfg.trials = n_trials;
      if (n_n_opt->count()) cfg.n_samples = n_n;
      if (n_fs_opt->count()) cfg.sample_rate_hz = n_fs;
      if (n_range_opt->count()) cfg.range = n_range;
      if (n_thr_opt->count()) cfg.white_threshold = n_threshold;
      cfg.master_seed = g.seed;
      const NoiseColorTable t = run_noise_color_sweep(cfg);
      json opts = to_json(cfg);
      opts["preset"] = n_preset.empty() ? json(nullptr) : json(n_preset);
      std::string summary = "noise-color N_min:";
      for (std::size_t i = 0; i < cfg.alphas.size(); ++i) {
        summary += " alpha=" + fmt("%g", cfg.alphas[i]) + "->" +
                   (t.n_min[i] ? std::to_string(*t.n_min[i]) : std::string("none"));
      }
      emitter.emit(t, meta_for("noise-color", opts), summary);
      return kExitOk;
    }

    if (*sens) {
      const ValidationConfig cfg = se_flags.resolve(g.seed, kPresetAlpha20);
      const SensitivityReport r = run_sensitivity(cfg, se_deltas);
      json opts = to_json(cfg);
      opts["preset"] = se_flags.preset.empty() ? std::string(kPresetAlpha20) : se_flags.preset;
      opts["deltas"] = se_deltas;
      std::string summary = "sensitivity alpha=" + fmt("%g", cfg.alpha) + ": measured ratio " +
                            fmt("%.3f", r.measured_ratio) + ";";
      for (const auto& e : r.entries) {
        summary += " d=" + fmt("%+g", e.delta_alpha) + ":" + fmt("%.1f", 100.0 * e.relative_error) + "%";
      }
      emitter.emit(r, meta_for("sensitivity", opts), summary);
      return kExitOk;
    }

    if (*peaks) {
      const ValidationConfig cfg = p_flags.resolve(g.seed, kPresetAlpha20);
      std::vector<PeakSpec> specs;
      for (const auto& p : p_peaks) {
        specs.push_back(parse_peak(p));
        validate(specs.back(), cfg.sample_rate_hz);
      }
      const PeakRobustnessReport r = run_peak_robustness(cfg, specs);
      json opts = to_json(cfg);
      opts["preset"] = p_flags.preset.empty() ? std::string(kPresetAlpha20) : p_flags.preset;
      opts["tested_peaks"] = json::array();
      for (const auto& p : specs) opts["tested_peaks"].push_back(to_json(p));
      std::string summary = "peaks: baseline error " +
                            fmt("%.2f", 100.0 * r.baseline.mean_error) + "%;";
      for (const auto& e : r.entries) {
        summary += " " + fmt("%g", e.peak.center_hz) + " Hz:" +
                   fmt("%.2f", 100.0 * e.report.mean_error) + "%";
      }
      emitter.emit(r, meta_for("peaks", opts), summary);
      return kExitOk;
    }

    if (*bands) {
      json opts;
      Signal x;
      if (b_in_opt->count()) {
        x = load_signal(b_in, b_signal_format, b_fs, b_channel);
        opts["in"] = b_in;
        opts["channel"] = b_channel;
      } else {
        SynthesisSpec spec;
        spec.alpha = b_alpha;
        spec.n_samples = b_n;
        spec.sample_rate_hz = b_fs;
        spec.seed = g.seed;
        validate(spec);
        x = synthesize(spec);
        opts["synthetic"] = {{"alpha", b_alpha}, {"n_samples", b_n}, {"seed", g.seed}};
      }
      const QuantizerConfig q{b_bits, b_range_opt->count() ? b_range : default_range(x)};
      validate(q);
      std::vector<NamedBand> band_list;
      if (b_bands.empty()) {
        band_list = default_eeg_bands(b_fs);
      } else {
        for (const auto& b : b_bands) band_list.push_back(parse_band(b));
      }
      const BandPowerReport r = run_band_power(x, q, band_list, b_segment);
      opts["fs"] = b_fs;
      opts["bits"] = q.bits;
      opts["range"] = q.range;
      opts["segment"] = r.segment_len;
      int preserved = 0;
      for (const auto& row : r.rows) preserved += row.preserved ? 1 : 0;
      std::string summary = "bands bits=" + std::to_string(q.bits) + ": " +
                            std::to_string(preserved) + "/" + std::to_string(r.rows.size()) +
                            " bands within [" + fmt("%g", kPreservedLow) + ", " +
                            fmt("%g", kPreservedHigh) + "]";
      emitter.emit(r, meta_for("bands", opts), summary);
      return kExitOk;
    }
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace quantband
