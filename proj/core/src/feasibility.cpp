#include "qkdfs/feasibility.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "qkdfs/honest.hpp"

namespace qkdfs {

std::string to_string(Verdict verdict) {
  return verdict == Verdict::Feasible ? "feasible" : "infeasible";
}

namespace {

double round_down(double x) {
  return std::nextafter(x, -std::numeric_limits<double>::infinity());
}
double round_up(double x) {
  return std::nextafter(x, std::numeric_limits<double>::infinity());
}

struct AffineMap {
  double offset = 0.0;
  double slope = 0.0;
};

double dark_pair(double p_d) { return -std::expm1(2.0 * std::log1p(-p_d)); }

double effective_mean(const AttackStrategy& strategy, const SourceSpec& source,
                      const SystemParams& system) {
  if (strategy.variant == AttackVariant::InterceptAtDistance) {
    return partial_transmittance(system.channel, strategy.intercept_km) *
           source.mean_photons;
  }
  return source.mean_photons;
}

AffineMap gain_map(const AttackStrategy& strategy, const SourceSpec& source,
                   const SystemParams& system) {
  double m = effective_mean(strategy, source, system);
  double slope = 0.5 * -std::expm1(-m);
  switch (strategy.variant) {
    case AttackVariant::NaiveGlobal:
      return AffineMap{0.0, slope};
    case AttackVariant::VacuumSplit:
    case AttackVariant::InterceptAtDistance:
      return AffineMap{std::exp(-m) * dark_pair(system.detector.dark_count),
                       slope};
    case AttackVariant::PhotonNumberResolving:
      break;
  }
  throw std::invalid_argument(
      "gain map is affine in eta_f only for the non-PNR strategies");
}

AffineMap error_map(const AttackStrategy& strategy, const SourceSpec& source,
                    const SystemParams& system) {
  if (strategy.variant != AttackVariant::VacuumSplit &&
      strategy.variant != AttackVariant::InterceptAtDistance) {
    throw std::invalid_argument(
        "error map has a fixed flip probability only for VacuumSplit and "
        "InterceptAtDistance");
  }
  double m = effective_mean(strategy, source, system);
  double e_d = system.detector.misalignment;
  return AffineMap{
      0.5 * std::exp(-m) * dark_pair(system.detector.dark_count),
      0.5 * e_d * -std::expm1(-m)};
}

// Preimage of `window` under offset + slope*eta_f, outward-rounded one ulp
// and clamped to [0,1]. Zero slope means the observation ignores eta_f:
// the window-containment question is then decided by `constant_in_window`.
Interval invert_affine(const AffineMap& map, const Interval& window,
                       bool constant_in_window_result, bool* unconstrained) {
  if (unconstrained) *unconstrained = false;
  if (window.is_empty()) return Interval::empty();
  if (map.slope == 0.0) {
    if (unconstrained) *unconstrained = true;
    return constant_in_window_result ? Interval::unit() : Interval::empty();
  }
  double lo = round_down((window.lo() - map.offset) / map.slope);
  double hi = round_up((window.hi() - map.offset) / map.slope);
  return intersect(Interval::closed(lo, hi), Interval::unit());
}

AcceptanceWindow window_for(double p, SourceLabel label,
                            const SessionStats& stats) {
  return acceptance_window(p, stats.for_source(label));
}

bool vacuum_rule_consistent(const SystemParams& system,
                            const SessionStats& stats) {
  double p_d = system.detector.dark_count;
  double rule_gain = 0.5 * (4.0 * p_d - 2.0 * p_d * p_d);
  double rule_error = 0.5 * rule_gain;
  SourceSpec vacuum{SourceLabel::Vacuum, 0.0};
  double eta = overall_transmittance(system.channel, system.detector);
  AcceptanceWindow gw = window_for(expected_gain(vacuum, eta, p_d),
                                   SourceLabel::Vacuum, stats);
  AcceptanceWindow ew = window_for(
      expected_error_gain(vacuum, eta, p_d, system.detector.misalignment),
      SourceLabel::Vacuum, stats);
  return gw.interval.contains(rule_gain) && ew.interval.contains(rule_error);
}

}  // namespace

Interval eta_f_interval_from_gain(const AttackStrategy& strategy,
                                  const SourceSpec& source,
                                  const SystemParams& system,
                                  const SessionStats& stats,
                                  bool* unconstrained) {
  HonestExpectation he = honest_expectation(source, system);
  AcceptanceWindow window = window_for(he.gain, source.label, stats);
  AffineMap map = gain_map(strategy, source, system);
  // A vacuum source leaves eta_f unconstrained regardless of whether its
  // constant observation matches (that is the vacuum-consistency check).
  return invert_affine(map, window.interval, true, unconstrained);
}

Interval e_f_interval(const SourceSpec& source, const SystemParams& system,
                      const SessionStats& stats) {
  HonestExpectation he = honest_expectation(source, system);
  AcceptanceWindow gain_w = window_for(he.gain, source.label, stats);
  AcceptanceWindow err_w = window_for(he.error_gain, source.label, stats);
  if (gain_w.interval.is_empty() || !(gain_w.interval.lo() > 0.0)) {
    throw std::domain_error(
        "gain window touches zero; source unusable for an e_f bound");
  }
  double lo = round_down(err_w.interval.lo() / gain_w.interval.hi());
  double hi = round_up(err_w.interval.hi() / gain_w.interval.lo());
  return intersect(Interval::closed(lo, hi), Interval::unit());
}

Interval eta_f_interval_from_error(const AttackStrategy& strategy,
                                   const SourceSpec& source,
                                   const SystemParams& system,
                                   const SessionStats& stats,
                                   bool* unconstrained) {
  HonestExpectation he = honest_expectation(source, system);
  AcceptanceWindow window = window_for(he.error_gain, source.label, stats);
  AffineMap map = error_map(strategy, source, system);
  // Covers both degenerate slopes: a vacuum source (mean 0) and e_d = 0.
  // The constant observation decides: inside the window the source is
  // unconstraining, outside it no eta_f can serve it.
  bool const_ok = window.interval.contains(map.offset);
  return invert_affine(map, window.interval, const_ok, unconstrained);
}

FeasibilityReport analyze(const AttackStrategy& strategy,
                          const SystemParams& system,
                          const SessionStats& stats) {
  validate(system);
  validate(stats);

  FeasibilityReport report;
  report.strategy = strategy;
  report.vacuum_consistency = vacuum_rule_consistent(system, stats);

  double e_d = system.detector.misalignment;
  bool naive = strategy.variant == AttackVariant::NaiveGlobal;
  bool pnr = strategy.variant == AttackVariant::PhotonNumberResolving;

  for (const SourceSpec& source : system.sources) {
    HonestExpectation he = honest_expectation(source, system);
    SourceWindows w;
    w.source = source.label;
    w.gain_window = window_for(he.gain, source.label, stats);
    w.error_window = window_for(he.error_gain, source.label, stats);

    if (pnr) {
      // The per-n attack reproduces the honest statistics identically for
      // every intensity, so eta_f plays no role; propagate realizability.
      ObservedStats obs = pnr_observed(
          source, overall_transmittance(system.channel, system.detector),
          system.detector.dark_count, e_d);
      (void)obs;
      w.eta_f_from_gain = Interval::unit();
      w.eta_f_from_error = Interval::unit();
      w.e_f_window = Interval::unit();
      w.combined_eta_f = Interval::unit();
      w.eta_f_unconstrained = true;
    } else {
      bool unconstrained_gain = false;
      w.eta_f_from_gain = eta_f_interval_from_gain(strategy, source, system,
                                                   stats, &unconstrained_gain);
      if (naive) {
        w.eta_f_from_error = Interval::unit();  // e_f is free
        // A gain window touching zero cannot bound the QBER ratio; such a
        // source contributes no e_f constraint.
        w.e_f_window = w.gain_window.interval.lo() > 0.0
                           ? e_f_interval(source, system, stats)
                           : Interval::unit();
      } else {
        w.eta_f_from_error =
            eta_f_interval_from_error(strategy, source, system, stats);
        w.e_f_window = Interval::closed(e_d, e_d);
      }
      w.combined_eta_f = intersect(w.eta_f_from_gain, w.eta_f_from_error);
      w.eta_f_unconstrained = unconstrained_gain;
    }
    report.per_source.push_back(std::move(w));
  }

  Interval cross_eta = Interval::unit();
  Interval cross_ef = naive ? Interval::unit() : Interval::closed(e_d, e_d);
  for (const SourceWindows& w : report.per_source) {
    if (w.source != SourceLabel::Signal && w.source != SourceLabel::Decoy) {
      continue;
    }
    if (w.eta_f_unconstrained) continue;
    cross_eta = intersect(cross_eta, w.combined_eta_f);
    if (naive) cross_ef = intersect(cross_ef, w.e_f_window);
  }
  report.cross_source_eta_f = cross_eta;
  report.cross_source_e_f = cross_ef;

  bool feasible = !cross_eta.is_empty();
  if (naive) feasible = feasible && !cross_ef.is_empty();
  report.verdict = feasible ? Verdict::Feasible : Verdict::Infeasible;
  return report;
}

std::vector<SweepRow> sweep_intercept(const SystemParams& system,
                                      const SessionStats& stats,
                                      std::span<const double> l_grid,
                                      int workers) {
  validate(system);
  for (double l : l_grid) {
    if (!(l >= 0.0) || l > system.channel.length_km) {
      throw std::invalid_argument("sweep grid must lie within [0, L]");
    }
  }
  std::vector<SweepRow> rows(l_grid.size());
  auto fill_row = [&](std::size_t i) {
    AttackStrategy strategy{AttackVariant::InterceptAtDistance, 0.0, 0.0,
                            l_grid[i]};
    FeasibilityReport rep = analyze(strategy, system, stats);
    rows[i] = SweepRow{l_grid[i], std::move(rep.per_source),
                       rep.cross_source_eta_f, rep.verdict};
  };

  unsigned n_workers = workers > 0 ? static_cast<unsigned>(workers)
                                   : std::thread::hardware_concurrency();
  if (n_workers <= 1 || l_grid.size() < 2) {
    for (std::size_t i = 0; i < rows.size(); ++i) fill_row(i);
    return rows;
  }
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < n_workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < rows.size(); i += n_workers) fill_row(i);
    });
  }
  for (auto& t : pool) t.join();
  return rows;
}

namespace {

struct CombinedPair {
  Interval signal;
  Interval decoy;
  bool has_decoy = false;
};

CombinedPair combined_at(double l, const SystemParams& system,
                         const SessionStats& stats) {
  AttackStrategy strategy{AttackVariant::InterceptAtDistance, 0.0, 0.0, l};
  CombinedPair out;
  for (const SourceSpec& source : system.sources) {
    if (source.label == SourceLabel::Vacuum) continue;
    bool unconstrained = false;
    Interval gain = eta_f_interval_from_gain(strategy, source, system, stats,
                                             &unconstrained);
    Interval err =
        eta_f_interval_from_error(strategy, source, system, stats);
    Interval combined = intersect(gain, err);
    if (source.label == SourceLabel::Signal) {
      out.signal = combined;
    } else if (source.label == SourceLabel::Decoy) {
      out.decoy = combined;
      out.has_decoy = true;
    }
  }
  return out;
}

template <typename Pred>
std::optional<double> first_true(Pred&& pred, double length_km,
                                 double resolution_km) {
  if (pred(0.0)) return 0.0;
  // Coarse 1 km scan to bracket the first flip, then bisection.
  double step = std::fmin(1.0, length_km);
  double prev = 0.0;
  double found = -1.0;
  for (double l = step; l <= length_km + 1e-9; l += step) {
    double li = std::fmin(l, length_km);
    if (pred(li)) {
      found = li;
      break;
    }
    prev = li;
  }
  if (found < 0.0) return std::nullopt;
  double lo = prev;
  double hi = found;
  while (hi - lo > resolution_km) {
    double mid = 0.5 * (lo + hi);
    if (pred(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

ThresholdReport find_thresholds(const SystemParams& system,
                                const SessionStats& stats,
                                double resolution_km) {
  validate(system);
  if (!(resolution_km > 0.0)) {
    throw std::invalid_argument("resolution_km must be > 0");
  }
  double length = system.channel.length_km;
  bool has_decoy = system.find(SourceLabel::Decoy) != nullptr;

  ThresholdReport report;
  report.signal_existence_km = first_true(
      [&](double l) { return !combined_at(l, system, stats).signal.is_empty(); },
      length, resolution_km);
  if (has_decoy) {
    report.overlap_km = first_true(
        [&](double l) {
          CombinedPair c = combined_at(l, system, stats);
          return !intersect(c.signal, c.decoy).is_empty();
        },
        length, resolution_km);
    report.containment_km = first_true(
        [&](double l) {
          CombinedPair c = combined_at(l, system, stats);
          return !c.signal.is_empty() && c.decoy.contains(c.signal);
        },
        length, resolution_km);
  }
  return report;
}

}  // namespace qkdfs
