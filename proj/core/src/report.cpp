#include "qkdfs/report.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>

#include <json.hpp>

namespace qkdfs {

namespace {

using nlohmann::json;

constexpr int kHumanDigits = 4;
constexpr int kMachineDigits = 6;

std::string interval_text(const Interval& iv, int sig) {
  if (iv.is_empty()) return "empty";
  return "[" + sci(iv.lo(), sig) + ", " + sci(iv.hi(), sig) + "]";
}

// Machine endpoint or "nan" for empty intervals; keeps CSV field counts fixed.
std::string csv_endpoint(const Interval& iv, bool high) {
  if (iv.is_empty()) return "nan";
  return sci(high ? iv.hi() : iv.lo(), kMachineDigits);
}

json interval_json(const Interval& iv) {
  if (iv.is_empty()) return json{{"empty", true}};
  return json{{"empty", false},
              {"lo", round_sig(iv.lo(), kMachineDigits)},
              {"hi", round_sig(iv.hi(), kMachineDigits)}};
}

json window_json(const AcceptanceWindow& w) {
  return json{{"center", round_sig(w.center, kMachineDigits)},
              {"half_width", round_sig(w.half_width, kMachineDigits)},
              {"interval", interval_json(w.interval)}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string sci(double x, int sig_digits) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*e", sig_digits - 1, x);
  return buf;
}

double round_sig(double x, int sig_digits) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*e", sig_digits - 1, x);
  return std::strtod(buf, nullptr);
}

ExpectReport make_expect_report(const SystemParams& system,
                                const SessionStats& stats) {
  validate(system);
  validate(stats);
  ExpectReport report;
  report.eta = overall_transmittance(system.channel, system.detector);
  for (const SourceSpec& source : system.sources) {
    SourceExpectRow row;
    row.source = source.label;
    row.mean_photons = source.mean_photons;
    row.expectation = honest_expectation(source, system);
    SessionStats per = stats.for_source(source.label);
    row.gain_window = acceptance_window(row.expectation.gain, per);
    row.error_window = acceptance_window(row.expectation.error_gain, per);
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string render_expect_text(const ExpectReport& report) {
  std::ostringstream out;
  out << "overall transmittance eta = " << sci(report.eta, kHumanDigits)
      << "\n\n";
  out << "source   mean      p_det        p_err        gain window              "
         "error window\n";
  for (const auto& row : report.rows) {
    char line[256];
    std::snprintf(line, sizeof line, "%-8s %-9s %-12s %-12s %-24s %s\n",
                  to_string(row.source).c_str(),
                  sci(row.mean_photons, kHumanDigits).c_str(),
                  sci(row.expectation.gain, kHumanDigits).c_str(),
                  sci(row.expectation.error_gain, kHumanDigits).c_str(),
                  interval_text(row.gain_window.interval, kHumanDigits).c_str(),
                  interval_text(row.error_window.interval, kHumanDigits).c_str());
    out << line;
  }
  return out.str();
}

std::string render_expect_csv(const ExpectReport& report) {
  std::ostringstream out;
  out << "source,mean_photons,p_det,p_err,gain_lo,gain_hi,err_lo,err_hi\n";
  for (const auto& row : report.rows) {
    out << to_string(row.source) << ','
        << sci(row.mean_photons, kMachineDigits) << ','
        << sci(row.expectation.gain, kMachineDigits) << ','
        << sci(row.expectation.error_gain, kMachineDigits) << ','
        << csv_endpoint(row.gain_window.interval, false) << ','
        << csv_endpoint(row.gain_window.interval, true) << ','
        << csv_endpoint(row.error_window.interval, false) << ','
        << csv_endpoint(row.error_window.interval, true) << '\n';
  }
  return out.str();
}

namespace {

json expect_row_json(const SourceExpectRow& row) {
  return json{{"source", to_string(row.source)},
              {"mean_photons", round_sig(row.mean_photons, kMachineDigits)},
              {"p_det", round_sig(row.expectation.gain, kMachineDigits)},
              {"p_err", round_sig(row.expectation.error_gain, kMachineDigits)},
              {"gain_window", window_json(row.gain_window)},
              {"error_window", window_json(row.error_window)}};
}

}  // namespace

std::string render_expect_json(const ExpectReport& report) {
  json j{{"eta", round_sig(report.eta, kMachineDigits)},
         {"sources", json::array()}};
  for (const auto& row : report.rows) j["sources"].push_back(expect_row_json(row));
  return dump(j);
}

std::string render_windows_text(const ExpectReport& report) {
  std::ostringstream out;
  for (const auto& row : report.rows) {
    out << to_string(row.source) << " gain  : center "
        << sci(row.gain_window.center, kHumanDigits) << "  delta "
        << sci(row.gain_window.half_width, kHumanDigits) << "  "
        << interval_text(row.gain_window.interval, kHumanDigits) << "\n";
    out << to_string(row.source) << " error : center "
        << sci(row.error_window.center, kHumanDigits) << "  delta "
        << sci(row.error_window.half_width, kHumanDigits) << "  "
        << interval_text(row.error_window.interval, kHumanDigits) << "\n";
  }
  return out.str();
}

std::string render_windows_csv(const ExpectReport& report) {
  std::ostringstream out;
  out << "source,quantity,center,half_width,lo,hi\n";
  for (const auto& row : report.rows) {
    for (auto [name, w] : {std::pair{"gain", &row.gain_window},
                           std::pair{"error", &row.error_window}}) {
      out << to_string(row.source) << ',' << name << ','
          << sci(w->center, kMachineDigits) << ','
          << sci(w->half_width, kMachineDigits) << ','
          << csv_endpoint(w->interval, false) << ','
          << csv_endpoint(w->interval, true) << '\n';
    }
  }
  return out.str();
}

std::string render_windows_json(const ExpectReport& report) {
  json j{{"sources", json::array()}};
  for (const auto& row : report.rows) {
    j["sources"].push_back(json{{"source", to_string(row.source)},
                                {"gain_window", window_json(row.gain_window)},
                                {"error_window", window_json(row.error_window)}});
  }
  return dump(j);
}

namespace {

std::string strategy_text(const AttackStrategy& s) {
  std::string out = to_string(s.variant);
  switch (s.variant) {
    case AttackVariant::NaiveGlobal:
      out += " (eta_f " + sci(s.resend_prob, kHumanDigits) + ", e_f " +
             sci(s.flip_prob, kHumanDigits) + ")";
      break;
    case AttackVariant::VacuumSplit:
      out += " (eta_f " + sci(s.resend_prob, kHumanDigits) + ")";
      break;
    case AttackVariant::InterceptAtDistance:
      out += " (eta_f " + sci(s.resend_prob, kHumanDigits) + ", l " +
             sci(s.intercept_km, kHumanDigits) + " km)";
      break;
    case AttackVariant::PhotonNumberResolving:
      break;
  }
  return out;
}

json strategy_json(const AttackStrategy& s) {
  json j{{"variant", to_string(s.variant)}};
  if (s.variant != AttackVariant::PhotonNumberResolving) {
    j["resend_prob"] = round_sig(s.resend_prob, kMachineDigits);
  }
  if (s.variant == AttackVariant::NaiveGlobal) {
    j["flip_prob"] = round_sig(s.flip_prob, kMachineDigits);
  }
  if (s.variant == AttackVariant::InterceptAtDistance) {
    j["intercept_km"] = round_sig(s.intercept_km, kMachineDigits);
  }
  return j;
}

json source_windows_json(const SourceWindows& w) {
  return json{{"source", to_string(w.source)},
              {"gain_window", window_json(w.gain_window)},
              {"error_window", window_json(w.error_window)},
              {"eta_f_from_gain", interval_json(w.eta_f_from_gain)},
              {"eta_f_from_error", interval_json(w.eta_f_from_error)},
              {"e_f_window", interval_json(w.e_f_window)},
              {"combined_eta_f", interval_json(w.combined_eta_f)},
              {"eta_f_unconstrained", w.eta_f_unconstrained}};
}

}  // namespace

std::string render_feasibility_text(const FeasibilityReport& report) {
  std::ostringstream out;
  out << "strategy: " << strategy_text(report.strategy) << "\n";
  out << "source   eta_f from gain          eta_f from error         combined "
         "eta_f           e_f window\n";
  for (const auto& w : report.per_source) {
    char line[256];
    std::snprintf(line, sizeof line, "%-8s %-24s %-24s %-24s %s%s\n",
                  to_string(w.source).c_str(),
                  interval_text(w.eta_f_from_gain, kHumanDigits).c_str(),
                  interval_text(w.eta_f_from_error, kHumanDigits).c_str(),
                  interval_text(w.combined_eta_f, kHumanDigits).c_str(),
                  interval_text(w.e_f_window, kHumanDigits).c_str(),
                  w.eta_f_unconstrained ? " (eta_f unconstrained)" : "");
    out << line;
  }
  out << "cross-source eta_f: "
      << interval_text(report.cross_source_eta_f, kHumanDigits) << "\n";
  out << "cross-source e_f:   "
      << interval_text(report.cross_source_e_f, kHumanDigits) << "\n";
  out << "vacuum consistency: " << (report.vacuum_consistency ? "yes" : "no")
      << "\n";
  out << "verdict: " << to_string(report.verdict) << "\n";
  return out.str();
}

std::string render_feasibility_csv(const FeasibilityReport& report) {
  std::ostringstream out;
  out << "source,gain_lo,gain_hi,err_lo,err_hi,combined_lo,combined_hi,"
         "e_f_lo,e_f_hi,unconstrained,verdict\n";
  for (const auto& w : report.per_source) {
    out << to_string(w.source) << ','
        << csv_endpoint(w.eta_f_from_gain, false) << ','
        << csv_endpoint(w.eta_f_from_gain, true) << ','
        << csv_endpoint(w.eta_f_from_error, false) << ','
        << csv_endpoint(w.eta_f_from_error, true) << ','
        << csv_endpoint(w.combined_eta_f, false) << ','
        << csv_endpoint(w.combined_eta_f, true) << ','
        << csv_endpoint(w.e_f_window, false) << ','
        << csv_endpoint(w.e_f_window, true) << ','
        << (w.eta_f_unconstrained ? "true" : "false") << ','
        << to_string(report.verdict) << '\n';
  }
  return out.str();
}

std::string render_feasibility_json(const FeasibilityReport& report) {
  json j{{"strategy", strategy_json(report.strategy)},
         {"sources", json::array()},
         {"cross_source_eta_f", interval_json(report.cross_source_eta_f)},
         {"cross_source_e_f", interval_json(report.cross_source_e_f)},
         {"vacuum_consistency", report.vacuum_consistency},
         {"verdict", to_string(report.verdict)}};
  for (const auto& w : report.per_source) {
    j["sources"].push_back(source_windows_json(w));
  }
  return dump(j);
}

std::string render_sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "l_km,source,eta_f_gain_lo,eta_f_gain_hi,eta_f_err_lo,eta_f_err_hi,"
         "combined_lo,combined_hi,feasible\n";
  for (const auto& row : rows) {
    for (const auto& w : row.per_source) {
      out << sci(row.l_km, kMachineDigits) << ',' << to_string(w.source) << ','
          << csv_endpoint(w.eta_f_from_gain, false) << ','
          << csv_endpoint(w.eta_f_from_gain, true) << ','
          << csv_endpoint(w.eta_f_from_error, false) << ','
          << csv_endpoint(w.eta_f_from_error, true) << ','
          << csv_endpoint(w.combined_eta_f, false) << ','
          << csv_endpoint(w.combined_eta_f, true) << ','
          << (row.verdict == Verdict::Feasible ? "true" : "false") << '\n';
    }
  }
  return out.str();
}

std::string render_sweep_text(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "l_km      source   gain-derived             error-derived            "
         "combined                 feasible\n";
  for (const auto& row : rows) {
    for (const auto& w : row.per_source) {
      char line[256];
      std::snprintf(line, sizeof line, "%-9s %-8s %-24s %-24s %-24s %s\n",
                    sci(row.l_km, kHumanDigits).c_str(),
                    to_string(w.source).c_str(),
                    interval_text(w.eta_f_from_gain, kHumanDigits).c_str(),
                    interval_text(w.eta_f_from_error, kHumanDigits).c_str(),
                    interval_text(w.combined_eta_f, kHumanDigits).c_str(),
                    row.verdict == Verdict::Feasible ? "yes" : "no");
      out << line;
    }
  }
  return out.str();
}

std::string render_sweep_json(const std::vector<SweepRow>& rows) {
  json grid = json::array();
  for (const auto& row : rows) {
    json r{{"l_km", round_sig(row.l_km, kMachineDigits)},
           {"sources", json::array()},
           {"cross_source_eta_f", interval_json(row.cross_source_eta_f)},
           {"feasible", row.verdict == Verdict::Feasible}};
    for (const auto& w : row.per_source) {
      r["sources"].push_back(source_windows_json(w));
    }
    grid.push_back(std::move(r));
  }
  return dump(json{{"grid", std::move(grid)}});
}

McReport make_mc_report(bool honest, const AttackStrategy& strategy,
                        const SystemParams& system, const TrialConfig& trial) {
  McReport report;
  report.honest = honest;
  report.strategy = strategy;
  report.pulses = trial.pulses;
  report.seed = trial.seed;
  EmpiricalStats stats = honest ? simulate_honest(system, trial)
                                : simulate_attack(strategy, system, trial);
  for (const auto& tally : stats.per_source) {
    const SourceSpec* source = system.find(tally.source);
    McSourceRow row;
    row.tally = tally;
    if (honest) {
      HonestExpectation he = honest_expectation(*source, system);
      row.analytic_gain = he.gain;
      row.analytic_error = he.error_gain;
    } else {
      ObservedStats obs = simulated_attack_expectation(strategy, *source, system);
      row.analytic_gain = obs.observed_gain;
      row.analytic_error = obs.observed_error;
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string render_mc_text(const McReport& report) {
  std::ostringstream out;
  out << "model: " << (report.honest ? "honest channel"
                                     : strategy_text(report.strategy))
      << "\npulses: " << report.pulses << "  seed: " << report.seed << "\n";
  for (const auto& row : report.rows) {
    const auto& t = row.tally;
    out << to_string(t.source) << ": sent " << t.pulses_sent << ", clicks "
        << t.detections << ", errors " << t.errors << "\n";
    out << "  gain  " << sci(t.gain_estimate, kHumanDigits) << " +- "
        << sci(t.gain_std_error, kHumanDigits) << "  (analytic "
        << sci(row.analytic_gain, kHumanDigits) << ")\n";
    out << "  error " << sci(t.error_gain_estimate, kHumanDigits) << " +- "
        << sci(t.error_std_error, kHumanDigits) << "  (analytic "
        << sci(row.analytic_error, kHumanDigits) << ")\n";
  }
  return out.str();
}

std::string render_mc_csv(const McReport& report) {
  std::ostringstream out;
  out << "source,pulses,detections,errors,gain,gain_se,analytic_gain,"
         "error,error_se,analytic_error\n";
  for (const auto& row : report.rows) {
    const auto& t = row.tally;
    out << to_string(t.source) << ',' << t.pulses_sent << ',' << t.detections
        << ',' << t.errors << ',' << sci(t.gain_estimate, kMachineDigits) << ','
        << sci(t.gain_std_error, kMachineDigits) << ','
        << sci(row.analytic_gain, kMachineDigits) << ','
        << sci(t.error_gain_estimate, kMachineDigits) << ','
        << sci(t.error_std_error, kMachineDigits) << ','
        << sci(row.analytic_error, kMachineDigits) << '\n';
  }
  return out.str();
}

std::string render_mc_json(const McReport& report) {
  json j{{"model", report.honest ? json("honest") : strategy_json(report.strategy)},
         {"pulses", report.pulses},
         {"seed", report.seed},
         {"sources", json::array()}};
  for (const auto& row : report.rows) {
    const auto& t = row.tally;
    j["sources"].push_back(
        json{{"source", to_string(t.source)},
             {"pulses", t.pulses_sent},
             {"detections", t.detections},
             {"errors", t.errors},
             {"gain", round_sig(t.gain_estimate, kMachineDigits)},
             {"gain_se", round_sig(t.gain_std_error, kMachineDigits)},
             {"analytic_gain", round_sig(row.analytic_gain, kMachineDigits)},
             {"error", round_sig(t.error_gain_estimate, kMachineDigits)},
             {"error_se", round_sig(t.error_std_error, kMachineDigits)},
             {"analytic_error", round_sig(row.analytic_error, kMachineDigits)}});
  }
  return dump(j);
}

std::string render_fluctuation_text(const FluctuationReport& report) {
  std::ostringstream out;
  out << "fluctuation check: " << report.sessions << " sessions of "
      << report.scaled_pulses << " pulses each\n";
  for (const auto& r : report.per_source) {
    out << to_string(r.source) << ": expected gain "
        << sci(r.expected_gain, kHumanDigits) << ", window "
        << interval_text(r.window, kHumanDigits) << "\n";
    out << "  outliers " << r.outliers << "/" << report.sessions
        << " (bound q = " << sci(r.bound_q, kHumanDigits) << ")\n";
    out << "  session sd " << sci(r.empirical_sd, kHumanDigits)
        << "  predicted " << sci(r.predicted_sd, kHumanDigits) << "\n";
  }
  return out.str();
}

std::string render_fluctuation_json(const FluctuationReport& report) {
  json j{{"scaled_pulses", report.scaled_pulses},
         {"sessions", report.sessions},
         {"sources", json::array()}};
  for (const auto& r : report.per_source) {
    j["sources"].push_back(
        json{{"source", to_string(r.source)},
             {"expected_gain", round_sig(r.expected_gain, kMachineDigits)},
             {"window", interval_json(r.window)},
             {"bound_q", round_sig(r.bound_q, kMachineDigits)},
             {"outliers", r.outliers},
             {"outlier_fraction", round_sig(r.outlier_fraction, kMachineDigits)},
             {"empirical_sd", round_sig(r.empirical_sd, kMachineDigits)},
             {"predicted_sd", round_sig(r.predicted_sd, kMachineDigits)}});
  }
  return dump(j);
}

}  // namespace qkdfs
