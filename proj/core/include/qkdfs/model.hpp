#pragma once

// Physical parameters of a decoy-state QKD link and the Poisson photon
// statistics shared by every other component.

#include <optional>
#include <string>
#include <vector>

namespace qkdfs {

enum class SourceLabel { Signal, Decoy, Vacuum };

std::string to_string(SourceLabel label);
std::optional<SourceLabel> parse_source_label(const std::string& name);

/// Fiber channel: attenuation coefficient (dB/km) and Alice-Bob length (km).
struct ChannelParams {
  double alpha_db_per_km = 0.21;
  double length_km = 0.0;
};

/// Receiver side: combined receiver+detector efficiency, per-detector
/// dark-count probability per gate, and optical misalignment error
/// probability. Two gated detectors are assumed throughout.
struct DetectorParams {
  double eta_bob = 1.0;
  double dark_count = 0.0;
  double misalignment = 0.0;
};

/// One pulse source: a label and its Poisson mean photon number.
struct SourceSpec {
  SourceLabel label = SourceLabel::Signal;
  double mean_photons = 0.0;
};

struct SystemParams {
  ChannelParams channel;
  DetectorParams detector;
  std::vector<SourceSpec> sources;

  const SourceSpec* find(SourceLabel label) const;
};

// Throw std::invalid_argument when a field is outside its physical range.
void validate(const ChannelParams& channel);
void validate(const DetectorParams& detector);
void validate(const SourceSpec& source);
void validate(const SystemParams& system);

/// Poisson probability mass: mean^n e^(-mean) / n!. Throws on negative
/// arguments.
double poisson_pmf(double mean, int n);

/// Smallest count whose Poisson tail mass is below kPoissonTailMass,
/// capped at kPoissonCutoffCap. Series over photon number stop here.
int poisson_cutoff(double mean);

inline constexpr double kPoissonTailMass = 1e-15;
inline constexpr int kPoissonCutoffCap = 200;

/// End-to-end single-photon transmittance eta = eta_bob * 10^(-alpha*L/10).
double overall_transmittance(const ChannelParams& channel,
                             const DetectorParams& detector);

/// Fiber-only transmittance at distance l from Alice: 10^(-alpha*l/10).
/// Requires 0 <= l_km <= channel.length_km.
double partial_transmittance(const ChannelParams& channel, double l_km);

}  // namespace qkdfs
