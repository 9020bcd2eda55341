#include "qkdfs/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace qkdfs {

SessionStats SessionStats::for_source(SourceLabel label) const {
  SessionStats out{pulse_count, confidence_exponent, {}};
  for (const auto& [src, n] : per_source_pulses) {
    if (src == label) out.pulse_count = n;
  }
  return out;
}

void validate(const SessionStats& stats) {
  if (!(stats.pulse_count >= 1.0) ||
      stats.pulse_count != std::floor(stats.pulse_count)) {
    throw std::invalid_argument("session pulse_count must be an integer >= 1");
  }
  if (!(stats.confidence_exponent > 0.0)) {
    throw std::invalid_argument("session confidence_exponent must be > 0");
  }
  for (const auto& [src, n] : stats.per_source_pulses) {
    if (!(n >= 1.0) || n != std::floor(n)) {
      throw std::invalid_argument("per-source pulse budget must be an integer >= 1");
    }
  }
}

Interval Interval::closed(double lo, double hi) {
  Interval iv;
  if (std::isnan(lo) || std::isnan(hi) || lo > hi) return iv;  // empty
  iv.lo_ = lo;
  iv.hi_ = hi;
  iv.empty_ = false;
  return iv;
}

Interval Interval::empty() { return Interval{}; }

double Interval::lo() const {
  if (empty_) throw std::logic_error("lo() on empty interval");
  return lo_;
}

double Interval::hi() const {
  if (empty_) throw std::logic_error("hi() on empty interval");
  return hi_;
}

bool Interval::contains(const Interval& other) const {
  if (other.empty_) return true;
  return !empty_ && lo_ <= other.lo_ && other.hi_ <= hi_;
}

Interval intersect(const Interval& a, const Interval& b) {
  if (a.is_empty() || b.is_empty()) return Interval::empty();
  return Interval::closed(std::fmax(a.lo(), b.lo()), std::fmin(a.hi(), b.hi()));
}

double deviation_bound(double p, const SessionStats& stats) {
  validate(stats);
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("probability must lie in [0,1]");
  }
  return std::sqrt(4.0 * p * stats.confidence_exponent / stats.pulse_count);
}

AcceptanceWindow acceptance_window(double p, const SessionStats& stats) {
  double delta = deviation_bound(p, stats);
  return AcceptanceWindow{
      p, delta,
      Interval::closed(std::fmax(0.0, p - delta), std::fmin(1.0, p + delta))};
}

}  // namespace qkdfs
