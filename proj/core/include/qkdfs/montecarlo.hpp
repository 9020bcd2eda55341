#pragma once

// Pulse-level stochastic simulator: the independent oracle for the analytic
// gain/QBER formulas, for honest sessions and for every attack strategy.

#include <cstdint>
#include <vector>

#include "qkdfs/attacks.hpp"
#include "qkdfs/stats.hpp"

namespace qkdfs {

struct TrialConfig {
  std::uint64_t pulses = 100'000'000;
  std::uint64_t seed = 0;
  // Per-source pulse fractions; must sum to 1 within 1e-12. Empty means a
  // uniform mix over the system's sources.
  std::vector<std::pair<SourceLabel, double>> source_mix;
  int workers = 0;  // <= 0 picks the hardware thread count
};

void validate(const TrialConfig& trial, const SystemParams& system);

struct SourceTally {
  SourceLabel source = SourceLabel::Signal;
  std::uint64_t pulses_sent = 0;
  std::uint64_t detections = 0;
  std::uint64_t errors = 0;
  // Derived rates. The honest simulator samples the per-n error expression
  // directly and applies the error convention's factor 1/2 here; the attack
  // simulator counts error events that estimate p'_err with no extra factor.
  double gain_estimate = 0.0;
  double error_gain_estimate = 0.0;
  double gain_std_error = 0.0;
  double error_std_error = 0.0;
};

struct EmpiricalStats {
  std::vector<SourceTally> per_source;

  const SourceTally* find(SourceLabel label) const;
};

EmpiricalStats simulate_honest(const SystemParams& system,
                               const TrialConfig& trial);

/// Simulates the attack model: Poisson photons (thinned by eta_l for
/// InterceptAtDistance), the n = 0 random-preparation rule, and resend /
/// basis-match / bit-flip sampling for n >= 1. Throws RealizabilityError
/// before sampling if the strategy needs unphysical parameters.
EmpiricalStats simulate_attack(const AttackStrategy& strategy,
                               const SystemParams& system,
                               const TrialConfig& trial);

/// Closed-form rates of exactly the model simulate_attack samples. For the
/// vacuum-aware strategies this equals the strategy's observed stats; for
/// NaiveGlobal it adds the n = 0 rule term that the simulator (but not the
/// Eq.-2-style naive bookkeeping) includes.
ObservedStats simulated_attack_expectation(const AttackStrategy& strategy,
                                           const SourceSpec& source,
                                           const SystemParams& system);

struct FluctuationSourceReport {
  SourceLabel source = SourceLabel::Signal;
  double expected_gain = 0.0;
  Interval window;          // expected_gain +- sqrt(4 p c / scaled_pulses)
  double bound_q = 0.0;     // exp(-confidence_exponent)
  std::uint64_t outliers = 0;
  double outlier_fraction = 0.0;
  double empirical_sd = 0.0;
  double predicted_sd = 0.0;  // sqrt(p (1-p) / scaled_pulses)
  std::vector<double> session_rates;  // one entry per session
};

struct FluctuationReport {
  std::uint64_t scaled_pulses = 0;
  std::uint64_t sessions = 0;
  std::vector<FluctuationSourceReport> per_source;
};

/// Runs `trials` independent honest sessions of `scaled_pulses` pulses per
/// source and checks each session's empirical gain against the acceptance
/// window recomputed for the reduced pulse budget.
FluctuationReport fluctuation_check(const SystemParams& system,
                                    const SessionStats& stats,
                                    std::uint64_t trials,
                                    std::uint64_t scaled_pulses,
                                    std::uint64_t seed);

}  // namespace qkdfs
