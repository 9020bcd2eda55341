#pragma once

// Inverts each strategy's observed-statistics maps against the finite-session
// acceptance windows: per-source eta_f / e_f feasibility intervals, their
// cross-source intersection, the intercept-distance sweep, and the threshold
// distances where the verdict changes.

#include <optional>
#include <span>
#include <vector>

#include "qkdfs/attacks.hpp"
#include "qkdfs/stats.hpp"

namespace qkdfs {

enum class Verdict { Feasible, Infeasible };

std::string to_string(Verdict verdict);

struct SourceWindows {
  SourceLabel source = SourceLabel::Signal;
  AcceptanceWindow gain_window;   // on p_det
  AcceptanceWindow error_window;  // on p_err
  Interval eta_f_from_gain;
  Interval eta_f_from_error;  // full [0,1] where the error map is free (NaiveGlobal)
  Interval e_f_window;        // NaiveGlobal; degenerate point {e_d} otherwise
  Interval combined_eta_f;    // intersect(eta_f_from_gain, eta_f_from_error)
  // True when the observed gain does not depend on eta_f (vacuum source):
  // the intervals above are then the unconstraining [0,1].
  bool eta_f_unconstrained = false;
};

struct FeasibilityReport {
  AttackStrategy strategy;
  std::vector<SourceWindows> per_source;
  Interval cross_source_eta_f;  // intersection over Signal and Decoy
  Interval cross_source_e_f;    // NaiveGlobal only; point {e_d} otherwise
  Verdict verdict = Verdict::Infeasible;
  bool vacuum_consistency = false;  // the n=0 preparation rule sits inside the
                                    // vacuum source's acceptance windows
};

/// Exact preimage of the gain acceptance window under the strategy's affine
/// gain map, outward-rounded one ulp and clamped to [0,1]. A zero-slope map
/// (vacuum source) yields [0,1] with *unconstrained set.
Interval eta_f_interval_from_gain(const AttackStrategy& strategy,
                                  const SourceSpec& source,
                                  const SystemParams& system,
                                  const SessionStats& stats,
                                  bool* unconstrained = nullptr);

/// NaiveGlobal only: extremal quotient of the error window over the gain
/// window, [(p_err-d_err)/(p_det+d_det), (p_err+d_err)/(p_det-d_det)],
/// clamped to [0,1]. Throws std::domain_error when the gain window touches 0.
Interval e_f_interval(const SourceSpec& source, const SystemParams& system,
                      const SessionStats& stats);

/// VacuumSplit / InterceptAtDistance: preimage of the error acceptance window
/// under the affine error map (flip probability fixed at e_d).
Interval eta_f_interval_from_error(const AttackStrategy& strategy,
                                   const SourceSpec& source,
                                   const SystemParams& system,
                                   const SessionStats& stats,
                                   bool* unconstrained = nullptr);

FeasibilityReport analyze(const AttackStrategy& strategy,
                          const SystemParams& system,
                          const SessionStats& stats);

struct SweepRow {
  double l_km = 0.0;
  std::vector<SourceWindows> per_source;
  Interval cross_source_eta_f;
  Verdict verdict = Verdict::Infeasible;
};

/// One InterceptAtDistance analysis per grid point. Rows may be computed in
/// parallel (`workers` threads; <= 0 picks the hardware count); output order
/// and values are independent of the worker count.
std::vector<SweepRow> sweep_intercept(const SystemParams& system,
                                      const SessionStats& stats,
                                      std::span<const double> l_grid,
                                      int workers = 0);

struct ThresholdReport {
  // Smallest intercept distance where the predicate holds, bracketed to the
  // requested resolution; absent when the predicate never holds on [0, L].
  std::optional<double> signal_existence_km;  // signal combined window non-empty
  std::optional<double> overlap_km;           // cross-source intersection non-empty
  std::optional<double> containment_km;       // signal window inside decoy window
};

ThresholdReport find_thresholds(const SystemParams& system,
                                const SessionStats& stats,
                                double resolution_km);

}  // namespace qkdfs
