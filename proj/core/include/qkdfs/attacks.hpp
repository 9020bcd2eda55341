#pragma once

// Observed (post-attack) detection and error probabilities Bob would record
// under each of the four fake-state schemes, as explicit functions of Eve's
// free parameters.

#include <stdexcept>

#include "qkdfs/model.hpp"

namespace qkdfs {

enum class AttackVariant {
  NaiveGlobal,            // one (eta_f, e_f) pair for all pulses
  PhotonNumberResolving,  // per-photon-number (eta_n^f, e_n^f)
  VacuumSplit,            // vacuum pulses mimic dark counts; flip fixed at e_d
  InterceptAtDistance,    // VacuumSplit applied at distance l from Alice
};

std::string to_string(AttackVariant variant);

struct AttackStrategy {
  AttackVariant variant = AttackVariant::NaiveGlobal;
  double resend_prob = 0.0;   // eta_f (unused by PhotonNumberResolving)
  double flip_prob = 0.0;     // e_f (NaiveGlobal only; others fix it to e_d)
  double intercept_km = 0.0;  // l (InterceptAtDistance only)
};

/// Per-photon-number attack parameters. resend_prob_n = 2[1-(1-p_d)^2(1-eta)^n]
/// can exceed 1; this is reported through `realizable`, never clamped.
struct PerPhotonAttack {
  int n = 0;
  double resend_prob_n = 0.0;    // eta_n^f
  double flip_prob_n = 0.0;      // e_n^f (1/2 at n = 0: random bit values)
  double vacuum_prep_prob = 0.0; // 4 p_d - 2 p_d^2
  bool realizable = true;
};

struct ObservedStats {
  SourceLabel source = SourceLabel::Signal;
  double observed_gain = 0.0;   // p'_det
  double observed_error = 0.0;  // p'_err
};

/// Raised when an attack requires unphysical parameters (resend probability
/// above 1 for some photon number in the truncated support).
class RealizabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// p'_det = (1/2) eta_f (1 - e^(-mean));  p'_err = e_f p'_det.
ObservedStats naive_observed(const SourceSpec& source, double eta_f,
                             double e_f);

PerPhotonAttack pnr_attack_parameters(int n, double eta, double p_d,
                                      double e_d);

/// Poisson mixture of the per-n attack; equals the honest expectation by
/// construction. Throws RealizabilityError if any eta_n^f in the truncated
/// support exceeds 1.
ObservedStats pnr_observed(const SourceSpec& source, double eta, double p_d,
                           double e_d);

/// p'_det = e^(-mean)[1-(1-p_d)^2] + (1/2) eta_f (1 - e^(-mean));
/// p'_err = (1/2) e^(-mean)[1-(1-p_d)^2] + (1/2) e_d eta_f (1 - e^(-mean)).
ObservedStats vacuum_split_observed(const SourceSpec& source, double eta_f,
                                    double p_d, double e_d);

/// VacuumSplit with the incoming Poisson mean thinned to
/// 10^(-alpha l / 10) * mean. Reduces exactly to vacuum_split_observed at
/// l = 0.
ObservedStats intercept_observed(const SourceSpec& source, double eta_f,
                                 double l_km, const SystemParams& system);

/// Dispatch on strategy.variant.
ObservedStats observed_stats(const AttackStrategy& strategy,
                             const SourceSpec& source,
                             const SystemParams& system);

}  // namespace qkdfs
