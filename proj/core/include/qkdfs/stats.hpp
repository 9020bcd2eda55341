#pragma once

// Finite-session acceptance windows: the interval of observed rates Alice
// and Bob accept around an expected probability, with half-width from the
// exp(-N delta^2 / 4p) fluctuation bound.

#include <utility>
#include <vector>

#include "qkdfs/model.hpp"

namespace qkdfs {

/// Session budget: total pulses N and the confidence exponent ln(1/q).
/// Optional per-source pulse budgets override N for that source's windows;
/// by default every source uses the same N (uniform rule).
struct SessionStats {
  double pulse_count = 1e10;
  double confidence_exponent = 25.0;
  std::vector<std::pair<SourceLabel, double>> per_source_pulses;

  /// Stats with the per-source override (if any) collapsed into pulse_count.
  SessionStats for_source(SourceLabel label) const;
};

void validate(const SessionStats& stats);

/// Closed real interval with an explicit empty state. Endpoint accessors
/// must not be called on an empty interval.
class Interval {
 public:
  Interval() = default;

  static Interval closed(double lo, double hi);  // lo > hi yields empty
  static Interval empty();
  static Interval unit() { return closed(0.0, 1.0); }

  bool is_empty() const { return empty_; }
  double lo() const;
  double hi() const;
  bool contains(double x) const { return !empty_ && lo_ <= x && x <= hi_; }
  bool contains(const Interval& other) const;

  bool operator==(const Interval&) const = default;

 private:
  double lo_ = 0.0;
  double hi_ = 0.0;
  bool empty_ = true;
};

Interval intersect(const Interval& a, const Interval& b);

struct AcceptanceWindow {
  double center = 0.0;
  double half_width = 0.0;
  Interval interval;  // [center - delta, center + delta] clamped to [0,1]
};

/// delta = sqrt(4 p ln(1/q) / N). For N = 1e10 and exponent 25 this is
/// exactly 1e-4 sqrt(p).
double deviation_bound(double p, const SessionStats& stats);

AcceptanceWindow acceptance_window(double p, const SessionStats& stats);

}  // namespace qkdfs
