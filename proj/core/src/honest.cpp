#include "qkdfs/honest.hpp"

#include <cmath>
#include <stdexcept>

namespace qkdfs {

namespace {

void check_probability(double value, const char* name) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw std::invalid_argument(std::string(name) + " must lie in [0,1]");
  }
}

}  // namespace

double click_prob_given_n(int n, double eta, double p_d) {
  if (n < 0) throw std::invalid_argument("photon number must be >= 0");
  check_probability(eta, "eta");
  check_probability(p_d, "p_d");
  // 1 - (1-p_d)^2 (1-eta)^n via expm1/log1p, keeping relative accuracy at
  // the ~1e-5 scale the window math depends on.
  double log_noclick = 2.0 * std::log1p(-p_d);
  if (n > 0) log_noclick += n * std::log1p(-eta);
  return -std::expm1(log_noclick);
}

double error_click_prob_given_n(int n, double eta, double p_d, double e_d) {
  if (n < 0) throw std::invalid_argument("photon number must be >= 0");
  check_probability(eta, "eta");
  check_probability(p_d, "p_d");
  if (!(e_d >= 0.0 && e_d <= 0.5)) {
    throw std::invalid_argument("e_d must lie in [0,1/2]");
  }
  double click = click_prob_given_n(n, eta, p_d);
  if (n == 0) return click;  // both bracket powers are 1
  // (1-eta e_d)^n - (1-eta(1-e_d))^n = e^b expm1(a-b), a >= b for e_d <= 1/2.
  double a = n * std::log1p(-eta * e_d);
  double b = n * std::log1p(-eta * (1.0 - e_d));
  double bracket = std::isinf(b) ? std::exp(a) : std::exp(b) * std::expm1(a - b);
  return std::fmax(0.0, click - (1.0 - p_d) * bracket);
}

double expected_gain(const SourceSpec& source, double eta, double p_d) {
  validate(source);
  check_probability(eta, "eta");
  check_probability(p_d, "p_d");
  return -std::expm1(2.0 * std::log1p(-p_d) - eta * source.mean_photons);
}

double expected_error_gain(const SourceSpec& source, double eta, double p_d,
                           double e_d) {
  validate(source);
  double gain = expected_gain(source, eta, p_d);
  if (!(e_d >= 0.0 && e_d <= 0.5)) {
    throw std::invalid_argument("e_d must lie in [0,1/2]");
  }
  double x = eta * source.mean_photons;
  // e^(-x e_d) - e^(-x(1-e_d)) = -e^(-x e_d) expm1(-x(1-2 e_d))
  double bracket = -std::exp(-x * e_d) * std::expm1(-x * (1.0 - 2.0 * e_d));
  return 0.5 * (gain - (1.0 - p_d) * bracket);
}

HonestExpectation honest_expectation(const SourceSpec& source,
                                     const SystemParams& system) {
  double eta = overall_transmittance(system.channel, system.detector);
  return HonestExpectation{
      source.label,
      expected_gain(source, eta, system.detector.dark_count),
      expected_error_gain(source, eta, system.detector.dark_count,
                          system.detector.misalignment)};
}

std::vector<HonestExpectation> honest_expectations(const SystemParams& system) {
  validate(system);
  std::vector<HonestExpectation> out;
  out.reserve(system.sources.size());
  for (const auto& s : system.sources) out.push_back(honest_expectation(s, system));
  return out;
}

}  // namespace qkdfs
