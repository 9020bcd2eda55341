#pragma once

// Report assembly and rendering. Human-readable text prints 4 significant
// digits; machine-readable CSV/JSON print 6. All renderers are pure string
// builders, so identical inputs give byte-identical output.

#include <cstdint>
#include <string>
#include <vector>

#include "qkdfs/feasibility.hpp"
#include "qkdfs/honest.hpp"
#include "qkdfs/montecarlo.hpp"

namespace qkdfs {

/// Scientific notation with the given significant digits ("%.*e").
std::string sci(double x, int sig_digits);

/// x rounded to the given significant decimal digits.
double round_sig(double x, int sig_digits);

struct SourceExpectRow {
  SourceLabel source = SourceLabel::Signal;
  double mean_photons = 0.0;
  HonestExpectation expectation;
  AcceptanceWindow gain_window;
  AcceptanceWindow error_window;
};

struct ExpectReport {
  double eta = 0.0;  // overall transmittance echo
  std::vector<SourceExpectRow> rows;
};

ExpectReport make_expect_report(const SystemParams& system,
                                const SessionStats& stats);

std::string render_expect_text(const ExpectReport& report);
std::string render_expect_csv(const ExpectReport& report);
std::string render_expect_json(const ExpectReport& report);

std::string render_windows_text(const ExpectReport& report);
std::string render_windows_csv(const ExpectReport& report);
std::string render_windows_json(const ExpectReport& report);

std::string render_feasibility_text(const FeasibilityReport& report);
std::string render_feasibility_csv(const FeasibilityReport& report);
std::string render_feasibility_json(const FeasibilityReport& report);

std::string render_sweep_text(const std::vector<SweepRow>& rows);
std::string render_sweep_csv(const std::vector<SweepRow>& rows);
std::string render_sweep_json(const std::vector<SweepRow>& rows);

struct McSourceRow {
  SourceTally tally;
  double analytic_gain = 0.0;
  double analytic_error = 0.0;
};

struct McReport {
  bool honest = true;
  AttackStrategy strategy;
  std::uint64_t pulses = 0;
  std::uint64_t seed = 0;
  std::vector<McSourceRow> rows;
};

/// Runs the simulation (honest channel or the given strategy) and pairs the
/// empirical tallies with their analytic references.
McReport make_mc_report(bool honest, const AttackStrategy& strategy,
                        const SystemParams& system, const TrialConfig& trial);

std::string render_mc_text(const McReport& report);
std::string render_mc_csv(const McReport& report);
std::string render_mc_json(const McReport& report);

std::string render_fluctuation_text(const FluctuationReport& report);
std::string render_fluctuation_json(const FluctuationReport& report);

}  // namespace qkdfs
