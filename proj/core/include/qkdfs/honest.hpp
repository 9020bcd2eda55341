#pragma once

// Bob's expected detection and error statistics per source when the channel
// is undisturbed. These are the targets an eavesdropper has to counterfeit.

#include <vector>

#include "qkdfs/model.hpp"

namespace qkdfs {

struct HonestExpectation {
  SourceLabel source = SourceLabel::Signal;
  double gain = 0.0;        // detection probability per emitted pulse
  double error_gain = 0.0;  // erroneous-detection probability per pulse
};

/// P(click | n photons) = 1 - (1-p_d)^2 (1-eta)^n.
double click_prob_given_n(int n, double eta, double p_d);

/// Per-n error expression
///   1 - (1-p_d)^2 (1-eta)^n - (1-p_d)[(1-eta e_d)^n - (1-eta+eta e_d)^n].
/// The honest error gain carries an extra overall factor 1/2 on top of the
/// Poisson mixture of this quantity.
double error_click_prob_given_n(int n, double eta, double p_d, double e_d);

/// Closed form 1 - (1-p_d)^2 e^(-eta*mean); equals the Poisson mixture of
/// click_prob_given_n.
double expected_gain(const SourceSpec& source, double eta, double p_d);

/// Closed form (1/2){1 - (1-p_d)^2 e^(-eta mean)
///                    - (1-p_d)[e^(-eta mean e_d) - e^(-eta mean (1-e_d))]}.
double expected_error_gain(const SourceSpec& source, double eta, double p_d,
                           double e_d);

HonestExpectation honest_expectation(const SourceSpec& source,
                                     const SystemParams& system);
std::vector<HonestExpectation> honest_expectations(const SystemParams& system);

}  // namespace qkdfs
