#pragma once

// Built-in reference regression: re-derives the workbench's reference results
// (window endpoints, verdicts, threshold distances) at the baseline link
// parameters and compares them at fixed tolerances.

#include <string>
#include <vector>

#include "qkdfs/stats.hpp"

namespace qkdfs {

/// Baseline link: 0.21 dB/km fiber over 120 km, eta_B = 4.5%,
/// p_d = 8.5e-7, e_d = 3.3%, signal mean 0.479, decoy mean 0.127.
SystemParams reference_system();

/// Baseline session: N = 1e10 pulses, confidence exponent 25.
SessionStats reference_session();

enum class RowKind {
  Value,     // scalar compared as |actual - expected| <= tolerance
  Distance,  // same, printed in km
  Flag,      // boolean; expected/actual are 0 or 1
};

struct ReferenceRow {
  std::string name;
  RowKind kind = RowKind::Value;
  double expected = 0.0;
  double actual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct ReproduceReport {
  std::vector<ReferenceRow> rows;
  bool all_pass = false;
};

/// One unit of a value's 4th significant decimal digit (e.g. 1e-7 for
/// 3.467e-4); the reference endpoints are quoted at that precision.
double fourth_digit_unit(double value);

ReproduceReport run_reference_checks();

std::string render_reproduce_text(const ReproduceReport& report);

}  // namespace qkdfs
