#include "qkdfs/attacks.hpp"

#include <cmath>
#include <string>

#include "qkdfs/honest.hpp"

namespace qkdfs {

std::string to_string(AttackVariant variant) {
  switch (variant) {
    case AttackVariant::NaiveGlobal: return "naive_global";
    case AttackVariant::PhotonNumberResolving: return "pnr";
    case AttackVariant::VacuumSplit: return "vacuum_split";
    case AttackVariant::InterceptAtDistance: return "intercept";
  }
  return "?";
}

namespace {

void check_probability(double value, const char* name) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw std::invalid_argument(std::string(name) + " must lie in [0,1]");
  }
}

// Shared kernel for the vacuum-aware schemes: Eve sees Poisson(mean_eff)
// photons, mimics dark counts on vacuum and resends non-vacuum results with
// probability eta_f, flipping the encoded bit with probability flip.
ObservedStats vacuum_rule_observed(SourceLabel label, double mean_eff,
                                   double eta_f, double flip, double p_d) {
  double dark = -std::expm1(2.0 * std::log1p(-p_d));  // 1 - (1-p_d)^2
  double vac = std::exp(-mean_eff) * dark;
  double resent = 0.5 * eta_f * -std::expm1(-mean_eff);
  return ObservedStats{label, vac + resent, 0.5 * vac + flip * resent};
}

}  // namespace

ObservedStats naive_observed(const SourceSpec& source, double eta_f,
                             double e_f) {
  validate(source);
  check_probability(eta_f, "eta_f");
  check_probability(e_f, "e_f");
  double gain = 0.5 * eta_f * -std::expm1(-source.mean_photons);
  return ObservedStats{source.label, gain, e_f * gain};
}

PerPhotonAttack pnr_attack_parameters(int n, double eta, double p_d,
                                      double e_d) {
  double click = click_prob_given_n(n, eta, p_d);
  double err = error_click_prob_given_n(n, eta, p_d, e_d);
  PerPhotonAttack out;
  out.n = n;
  out.resend_prob_n = 2.0 * click;  // at n = 0 this is 4 p_d - 2 p_d^2
  out.vacuum_prep_prob = 4.0 * p_d - 2.0 * p_d * p_d;
  out.realizable = out.resend_prob_n <= 1.0;
  // e_n^f is the error share of resent clicks; random bit values at n = 0
  // (and in the degenerate no-click case) make half of them wrong.
  out.flip_prob_n = (n == 0 || click == 0.0) ? 0.5 : err / out.resend_prob_n;
  return out;
}

ObservedStats pnr_observed(const SourceSpec& source, double eta, double p_d,
                           double e_d) {
  validate(source);
  int cutoff = poisson_cutoff(source.mean_photons);
  double gain = 0.0;
  double error = 0.0;
  for (int n = 0; n <= cutoff; ++n) {
    PerPhotonAttack per_n = pnr_attack_parameters(n, eta, p_d, e_d);
    if (!per_n.realizable) {
      throw RealizabilityError("pnr attack needs eta_" + std::to_string(n) +
                               "^f = " + std::to_string(per_n.resend_prob_n) +
                               " > 1");
    }
    double pmf = poisson_pmf(source.mean_photons, n);
    gain += pmf * 0.5 * per_n.resend_prob_n;
    error += pmf * 0.5 * per_n.resend_prob_n * per_n.flip_prob_n;
  }
  return ObservedStats{source.label, gain, error};
}

ObservedStats vacuum_split_observed(const SourceSpec& source, double eta_f,
                                    double p_d, double e_d) {
  validate(source);
  check_probability(eta_f, "eta_f");
  check_probability(p_d, "p_d");
  check_probability(e_d, "e_d");
  return vacuum_rule_observed(source.label, source.mean_photons, eta_f, e_d,
                              p_d);
}

ObservedStats intercept_observed(const SourceSpec& source, double eta_f,
                                 double l_km, const SystemParams& system) {
  validate(source);
  check_probability(eta_f, "eta_f");
  double eta_l = partial_transmittance(system.channel, l_km);
  return vacuum_rule_observed(source.label, eta_l * source.mean_photons, eta_f,
                              system.detector.misalignment,
                              system.detector.dark_count);
}

ObservedStats observed_stats(const AttackStrategy& strategy,
                             const SourceSpec& source,
                             const SystemParams& system) {
  switch (strategy.variant) {
    case AttackVariant::NaiveGlobal:
      return naive_observed(source, strategy.resend_prob, strategy.flip_prob);
    case AttackVariant::PhotonNumberResolving:
      return pnr_observed(source,
                          overall_transmittance(system.channel, system.detector),
                          system.detector.dark_count,
                          system.detector.misalignment);
    case AttackVariant::VacuumSplit:
      return vacuum_split_observed(source, strategy.resend_prob,
                                   system.detector.dark_count,
                                   system.detector.misalignment);
    case AttackVariant::InterceptAtDistance:
      return intercept_observed(source, strategy.resend_prob,
                                strategy.intercept_km, system);
  }
  throw std::invalid_argument("unknown attack variant");
}

}  // namespace qkdfs
