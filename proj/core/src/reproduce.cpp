#include "qkdfs/reproduce.hpp"

#include <cmath>
#include <sstream>

#include "qkdfs/feasibility.hpp"
#include "qkdfs/honest.hpp"
#include "qkdfs/report.hpp"

namespace qkdfs {

SystemParams reference_system() {
  SystemParams system;
  system.channel = ChannelParams{0.21, 120.0};
  system.detector = DetectorParams{0.045, 8.5e-7, 0.033};
  system.sources = {SourceSpec{SourceLabel::Signal, 0.479},
                    SourceSpec{SourceLabel::Decoy, 0.127}};
  return system;
}

SessionStats reference_session() { return SessionStats{1e10, 25.0, {}}; }

double fourth_digit_unit(double value) {
  return std::pow(10.0, std::floor(std::log10(std::fabs(value))) - 3.0);
}

namespace {

void add_value(ReproduceReport& report, const std::string& name,
               double expected, double actual, double tolerance,
               RowKind kind = RowKind::Value) {
  bool pass = std::fabs(actual - expected) <= tolerance;
  report.rows.push_back(ReferenceRow{name, kind, expected, actual, tolerance, pass});
}

void add_flag(ReproduceReport& report, const std::string& name, bool expected,
              bool actual) {
  report.rows.push_back(ReferenceRow{name, RowKind::Flag, expected ? 1.0 : 0.0,
                                     actual ? 1.0 : 0.0, 0.0,
                                     expected == actual});
}

void add_interval(ReproduceReport& report, const std::string& name,
                  double expected_lo, double expected_hi, const Interval& iv,
                  double tol_units) {
  if (iv.is_empty()) {
    add_flag(report, name + " non-empty", true, false);
    return;
  }
  add_value(report, name + " lo", expected_lo, iv.lo(),
            tol_units * fourth_digit_unit(expected_lo));
  add_value(report, name + " hi", expected_hi, iv.hi(),
            tol_units * fourth_digit_unit(expected_hi));
}

const SourceWindows* find_source(const FeasibilityReport& rep,
                                 SourceLabel label) {
  for (const auto& w : rep.per_source) {
    if (w.source == label) return &w;
  }
  return nullptr;
}

}  // namespace

ReproduceReport run_reference_checks() {
  ReproduceReport report;
  SystemParams system = reference_system();
  SessionStats session = reference_session();

  double eta = overall_transmittance(system.channel, system.detector);
  add_value(report, "overall transmittance eta", 1.359e-4, eta,
            0.5 * fourth_digit_unit(1.359e-4));

  // Naive global strategy: per-source eta_f and e_f windows, no overlap.
  FeasibilityReport naive = analyze(
      AttackStrategy{AttackVariant::NaiveGlobal, 0.0, 0.0, 0.0}, system, session);
  const SourceWindows* sig = find_source(naive, SourceLabel::Signal);
  const SourceWindows* dec = find_source(naive, SourceLabel::Decoy);
  add_interval(report, "naive signal eta_f", 3.467e-4, 3.553e-4,
               sig->combined_eta_f, 1.0);
  add_interval(report, "naive signal e_f", 4.178e-2, 4.806e-2, sig->e_f_window,
               1.0);
  add_interval(report, "naive decoy eta_f", 3.106e-4, 3.252e-4,
               dec->combined_eta_f, 1.0);
  add_interval(report, "naive decoy e_f", 6.705e-2, 8.307e-2, dec->e_f_window,
               1.0);
  add_flag(report, "naive verdict infeasible", true,
           naive.verdict == Verdict::Infeasible);

  // Vacuum-split: no signal window at all, decoy window survives.
  FeasibilityReport vs = analyze(
      AttackStrategy{AttackVariant::VacuumSplit, 0.0, 0.0, 0.0}, system, session);
  sig = find_source(vs, SourceLabel::Signal);
  dec = find_source(vs, SourceLabel::Decoy);
  add_flag(report, "vacuum-split signal window empty", true,
           sig->combined_eta_f.is_empty());
  add_interval(report, "vacuum-split decoy eta_f", 2.855e-4, 3.001e-4,
               dec->combined_eta_f, 1.0);
  add_flag(report, "vacuum-split verdict infeasible", true,
           vs.verdict == Verdict::Infeasible);

  // Intercept at the far end of the link.
  FeasibilityReport far = analyze(
      AttackStrategy{AttackVariant::InterceptAtDistance, 0.0, 0.0, 120.0},
      system, session);
  sig = find_source(far, SourceLabel::Signal);
  dec = find_source(far, SourceLabel::Decoy);
  add_interval(report, "intercept(120km) signal eta_f", 8.893e-2, 9.120e-2,
               sig->combined_eta_f, 2.0);
  add_interval(report, "intercept(120km) decoy eta_f", 8.775e-2, 9.229e-2,
               dec->combined_eta_f, 2.0);
  add_flag(report, "intercept(120km) verdict feasible", true,
           far.verdict == Verdict::Feasible);

  // Threshold distances at 0.5 km resolution.
  ThresholdReport thresholds = find_thresholds(system, session, 0.5);
  auto add_threshold = [&](const std::string& name, double expected,
                           const std::optional<double>& actual) {
    if (!actual) {
      add_flag(report, name + " found", true, false);
      return;
    }
    add_value(report, name, expected, *actual, 2.5, RowKind::Distance);
  };
  add_threshold("threshold signal-window existence km", 10.0,
                thresholds.signal_existence_km);
  add_threshold("threshold cross-source overlap km", 30.0,
                thresholds.overlap_km);
  add_threshold("threshold signal-in-decoy containment km", 45.0,
                thresholds.containment_km);

  // Photon-number-resolving identity: the per-n attack reproduces the honest
  // statistics for any intensity.
  double worst = 0.0;
  for (int i = 1; i <= 50; ++i) {
    SourceSpec probe{SourceLabel::Signal, 0.04 * i};
    ObservedStats obs = pnr_observed(probe, eta, system.detector.dark_count,
                                     system.detector.misalignment);
    HonestExpectation he = honest_expectation(probe, system);
    worst = std::fmax(worst, std::fabs(obs.observed_gain - he.gain));
    worst = std::fmax(worst, std::fabs(obs.observed_error - he.error_gain));
  }
  add_value(report, "pnr identity max deviation", 0.0, worst, 1e-12);

  // Vacuum-rule consistency: the n = 0 preparation rule equals the honest
  // dark-count gain to one ulp.
  double p_d = system.detector.dark_count;
  double rule = 0.5 * (4.0 * p_d - 2.0 * p_d * p_d);
  double dark = expected_gain(SourceSpec{SourceLabel::Vacuum, 0.0}, eta, p_d);
  double ulp = std::nextafter(dark, 2.0) - dark;
  add_flag(report, "vacuum rule matches dark-count gain", true,
           std::fabs(rule - dark) <= ulp);

  report.all_pass = true;
  for (const auto& row : report.rows) report.all_pass = report.all_pass && row.pass;
  return report;
}

std::string render_reproduce_text(const ReproduceReport& report) {
  std::ostringstream out;
  for (const auto& row : report.rows) {
    out << (row.pass ? "[PASS] " : "[FAIL] ") << row.name << ": expected ";
    switch (row.kind) {
      case RowKind::Value:
        out << sci(row.expected, 4) << ", got " << sci(row.actual, 4)
            << " (tolerance " << sci(row.tolerance, 2) << ")";
        break;
      case RowKind::Distance: {
        char buf[96];
        std::snprintf(buf, sizeof buf, "%.1f km, got %.2f km (tolerance %.1f km)",
                      row.expected, row.actual, row.tolerance);
        out << buf;
        break;
      }
      case RowKind::Flag:
        out << (row.expected != 0.0 ? "yes" : "no") << ", got "
            << (row.actual != 0.0 ? "yes" : "no");
        break;
    }
    out << "\n";
  }
  out << (report.all_pass ? "all reference checks passed\n"
                          : "some reference checks FAILED\n");
  return out.str();
}

}  // namespace qkdfs
