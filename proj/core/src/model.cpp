#include "qkdfs/model.hpp"

#include <cmath>
#include <stdexcept>

namespace qkdfs {

std::string to_string(SourceLabel label) {
  switch (label) {
    case SourceLabel::Signal: return "signal";
    case SourceLabel::Decoy: return "decoy";
    case SourceLabel::Vacuum: return "vacuum";
  }
  return "?";
}

std::optional<SourceLabel> parse_source_label(const std::string& name) {
  if (name == "signal") return SourceLabel::Signal;
  if (name == "decoy") return SourceLabel::Decoy;
  if (name == "vacuum") return SourceLabel::Vacuum;
  return std::nullopt;
}

const SourceSpec* SystemParams::find(SourceLabel label) const {
  for (const auto& s : sources) {
    if (s.label == label) return &s;
  }
  return nullptr;
}

void validate(const ChannelParams& channel) {
  if (!(channel.alpha_db_per_km >= 0.0)) {
    throw std::invalid_argument("channel.alpha_db_per_km must be >= 0");
  }
  if (!(channel.length_km >= 0.0)) {
    throw std::invalid_argument("channel.length_km must be >= 0");
  }
}

void validate(const DetectorParams& detector) {
  if (!(detector.eta_bob >= 0.0 && detector.eta_bob <= 1.0)) {
    throw std::invalid_argument("detector.eta_bob must lie in [0,1]");
  }
  if (!(detector.dark_count >= 0.0 && detector.dark_count <= 1.0)) {
    throw std::invalid_argument("detector.dark_count must lie in [0,1]");
  }
  if (!(detector.misalignment >= 0.0 && detector.misalignment <= 0.5)) {
    throw std::invalid_argument("detector.misalignment must lie in [0,1/2]");
  }
}

void validate(const SourceSpec& source) {
  if (!(source.mean_photons >= 0.0)) {
    throw std::invalid_argument("source mean_photons must be >= 0");
  }
  if (source.label == SourceLabel::Vacuum && source.mean_photons != 0.0) {
    throw std::invalid_argument("vacuum source must have mean_photons = 0");
  }
}

void validate(const SystemParams& system) {
  validate(system.channel);
  validate(system.detector);
  bool has_signal = false;
  for (std::size_t i = 0; i < system.sources.size(); ++i) {
    validate(system.sources[i]);
    if (system.sources[i].label == SourceLabel::Signal) has_signal = true;
    for (std::size_t j = i + 1; j < system.sources.size(); ++j) {
      if (system.sources[i].label == system.sources[j].label) {
        throw std::invalid_argument("source labels must be unique");
      }
    }
  }
  if (!has_signal) {
    throw std::invalid_argument("at least one signal source is required");
  }
}

double poisson_pmf(double mean, int n) {
  if (!(mean >= 0.0)) throw std::invalid_argument("poisson mean must be >= 0");
  if (n < 0) throw std::invalid_argument("photon number must be >= 0");
  if (mean == 0.0) return n == 0 ? 1.0 : 0.0;
  return std::exp(n * std::log(mean) - mean - std::lgamma(n + 1.0));
}

int poisson_cutoff(double mean) {
  if (!(mean >= 0.0)) throw std::invalid_argument("poisson mean must be >= 0");
  if (mean == 0.0) return 0;
  double pmf = std::exp(-mean);
  double cumulative = pmf;
  int n = 0;
  while (1.0 - cumulative > kPoissonTailMass && n < kPoissonCutoffCap) {
    ++n;
    pmf *= mean / n;
    cumulative += pmf;
  }
  return n;
}

namespace {

// dB attenuation to linear transmittance. Evaluated in long double so the
// exponent additivity 10^(-a/10)*10^(-b/10) = 10^(-(a+b)/10) survives the
// rounding to double (the composition invariant is checked to 2 ulps).
double db_loss_to_linear(long double db) {
  return static_cast<double>(powl(10.0L, -db / 10.0L));
}

}  // namespace

double overall_transmittance(const ChannelParams& channel,
                             const DetectorParams& detector) {
  validate(channel);
  validate(detector);
  long double db = static_cast<long double>(channel.alpha_db_per_km) *
                   static_cast<long double>(channel.length_km);
  return detector.eta_bob * db_loss_to_linear(db);
}

double partial_transmittance(const ChannelParams& channel, double l_km) {
  validate(channel);
  if (!(l_km >= 0.0) || l_km > channel.length_km) {
    throw std::invalid_argument(
        "intercept distance must lie in [0, channel.length_km]");
  }
  long double db = static_cast<long double>(channel.alpha_db_per_km) *
                   static_cast<long double>(l_km);
  return db_loss_to_linear(db);
}

}  // namespace qkdfs
