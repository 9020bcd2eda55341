#pragma once

// Flat key-value run configuration with dotted section prefixes. The same
// struct drives every CLI subcommand; command-line flags override fields
// after loading.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qkdfs/attacks.hpp"
#include "qkdfs/montecarlo.hpp"
#include "qkdfs/stats.hpp"

namespace qkdfs {

struct SweepGrid {
  double start_km = 0.0;
  double stop_km = 0.0;
  double step_km = 1.0;

  std::vector<double> points() const;
};

enum class OutputFormat { Text, Csv, Json };

std::string to_string(OutputFormat format);

struct RunConfig {
  SystemParams system;
  SessionStats session;
  AttackStrategy strategy;
  bool strategy_set = false;  // attack.strategy appeared (or --strategy)
  bool mc_honest = true;      // mc simulates the honest channel unless an
                              // attack strategy was selected
  SweepGrid sweep;
  bool sweep_set = false;
  TrialConfig trial;
  std::uint64_t fluct_trials = 0;  // 0 disables the fluctuation report
  std::uint64_t fluct_pulses = 10'000'000;
  OutputFormat format = OutputFormat::Text;
  std::string out_path;  // empty or "-" writes to stdout
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& origin, int line, const std::string& what)
      : std::runtime_error(origin + ":" + std::to_string(line) + ": " + what),
        line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

/// Parses config text. `origin` names the source in diagnostics. Unknown
/// keys, malformed values, and invariant violations raise ConfigError with
/// the offending line number.
RunConfig parse_config(std::string_view text, const std::string& origin);

RunConfig load_config(const std::string& path);

/// Parses a "start:stop:step" sweep grid spec (used by --grid).
SweepGrid parse_grid_spec(const std::string& spec);

}  // namespace qkdfs
