#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "quantband/colored_noise.hpp"
#include "quantband/experiments.hpp"

namespace quantband {

/// Exit statuses of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitRuntime = 1, kExitUsage = 2 };

inline constexpr std::string_view kPresetAlpha15 = "paper-alpha15";
inline constexpr std::string_view kPresetAlpha20 = "paper-alpha20";
inline constexpr std::string_view kPresetAlpha25 = "paper-alpha25";
inline constexpr std::string_view kPresetTable2 = "paper-table2";

/// Validation presets: paper-alpha15, paper-alpha20, paper-alpha25.
ValidationConfig validation_preset(std::string_view name);
/// Noise-color preset: paper-table2.
NoiseSweepConfig noise_preset(std::string_view name);

/// "center:width:amplitude", e.g. "10:1:50".
PeakSpec parse_peak(std::string_view text);
/// "lo:hi" or a single bit depth.
BitRange parse_bit_range(std::string_view text);
/// "name:lo:hi".
NamedBand parse_band(std::string_view text);

/// Runs the tool with argv-style arguments (args[0] is the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace quantband
