#include "qkdfs/montecarlo.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

#include "qkdfs/honest.hpp"
#include "qkdfs/rng.hpp"

namespace qkdfs {

namespace {

constexpr std::uint64_t kSelectionTag = 0x5e1ec7ULL;   // source-selection stream
constexpr std::uint64_t kSessionTag = 0xf1a7ULL;       // fluctuation sessions

struct PoissonTable {
  std::vector<double> cdf;

  int sample(double u) const {
    int last = static_cast<int>(cdf.size()) - 1;
    for (int n = 0; n < last; ++n) {
      if (u < cdf[n]) return n;
    }
    return last;
  }
};

PoissonTable build_poisson_table(double mean) {
  int cutoff = poisson_cutoff(mean);
  PoissonTable table;
  table.cdf.resize(cutoff + 1);
  double pmf = std::exp(-mean);
  double cumulative = pmf;
  table.cdf[0] = cumulative;
  for (int n = 1; n <= cutoff; ++n) {
    pmf *= mean / n;
    cumulative += pmf;
    table.cdf[n] = cumulative;
  }
  return table;
}

// Everything one worker needs to process a pulse of one source.
struct SourceSim {
  SourceLabel label = SourceLabel::Signal;
  double mix_hi = 1.0;        // cumulative upper edge of the selection bracket
  std::uint64_t stream_tag = 0;
  PoissonTable photons;
  // Honest outcome thresholds per photon number.
  std::vector<double> error_cut;  // E(n)
  std::vector<double> click_cut;  // C(n)
  // Attack parameters per photon number (index 0 unused by the resend path).
  double half_rule = 0.0;  // (1/2)(4 p_d - 2 p_d^2)
  std::vector<double> resend;
  std::vector<double> flip;
};

struct Tally {
  std::uint64_t pulses = 0;
  std::uint64_t detections = 0;
  std::uint64_t errors = 0;
};

std::vector<std::pair<SourceLabel, double>> effective_mix(
    const SystemParams& system, const TrialConfig& trial) {
  if (!trial.source_mix.empty()) return trial.source_mix;
  std::vector<std::pair<SourceLabel, double>> mix;
  double f = 1.0 / static_cast<double>(system.sources.size());
  for (const auto& s : system.sources) mix.emplace_back(s.label, f);
  return mix;
}

template <typename Outcome>
std::vector<Tally> run_pulses(const std::vector<SourceSim>& sims,
                              const TrialConfig& trial, Outcome&& outcome) {
  auto process_range = [&](std::uint64_t begin, std::uint64_t end,
                           std::vector<Tally>& local) {
    bool select = sims.size() > 1;
    for (std::uint64_t i = begin; i < end; ++i) {
      std::size_t s = 0;
      if (select) {
        double u =
            SplitMix64(stream_key(trial.seed, kSelectionTag, i)).next_unit();
        while (s + 1 < sims.size() && u >= sims[s].mix_hi) ++s;
      }
      SplitMix64 rng(stream_key(trial.seed, sims[s].stream_tag, i));
      ++local[s].pulses;
      outcome(sims[s], rng, local[s]);
    }
  };

  unsigned n_workers = trial.workers > 0
                           ? static_cast<unsigned>(trial.workers)
                           : std::max(1u, std::thread::hardware_concurrency());
  n_workers = static_cast<unsigned>(
      std::min<std::uint64_t>(n_workers, std::max<std::uint64_t>(1, trial.pulses)));

  std::vector<std::vector<Tally>> partial(n_workers,
                                          std::vector<Tally>(sims.size()));
  if (n_workers == 1) {
    process_range(0, trial.pulses, partial[0]);
  } else {
    std::vector<std::thread> pool;
    std::uint64_t chunk = trial.pulses / n_workers;
    std::uint64_t rem = trial.pulses % n_workers;
    std::uint64_t begin = 0;
    for (unsigned w = 0; w < n_workers; ++w) {
      std::uint64_t end = begin + chunk + (w < rem ? 1 : 0);
      pool.emplace_back(process_range, begin, end, std::ref(partial[w]));
      begin = end;
    }
    for (auto& t : pool) t.join();
  }

  std::vector<Tally> total(sims.size());
  for (const auto& local : partial) {
    for (std::size_t s = 0; s < sims.size(); ++s) {
      total[s].pulses += local[s].pulses;
      total[s].detections += local[s].detections;
      total[s].errors += local[s].errors;
    }
  }
  return total;
}

double binomial_se(double rate, double n) {
  return n > 0 ? std::sqrt(rate * (1.0 - rate) / n) : 0.0;
}

EmpiricalStats finalize(const std::vector<SourceSim>& sims,
                        const std::vector<Tally>& tallies, bool honest) {
  EmpiricalStats out;
  for (std::size_t s = 0; s < sims.size(); ++s) {
    SourceTally t;
    t.source = sims[s].label;
    t.pulses_sent = tallies[s].pulses;
    t.detections = tallies[s].detections;
    t.errors = tallies[s].errors;
    double n = static_cast<double>(t.pulses_sent);
    if (n > 0) {
      t.gain_estimate = static_cast<double>(t.detections) / n;
      t.gain_std_error = binomial_se(t.gain_estimate, n);
      double raw_err = static_cast<double>(t.errors) / n;
      if (honest) {
        // raw_err estimates twice the error gain (the per-n expression is
        // sampled without its overall 1/2).
        t.error_gain_estimate = 0.5 * raw_err;
        t.error_std_error = 0.5 * binomial_se(raw_err, n);
      } else {
        t.error_gain_estimate = raw_err;
        t.error_std_error = binomial_se(raw_err, n);
      }
    }
    out.per_source.push_back(std::move(t));
  }
  return out;
}

std::vector<SourceSim> base_sims(const SystemParams& system,
                                 const TrialConfig& trial,
                                 bool thin_by_partial, double l_km) {
  auto mix = effective_mix(system, trial);
  std::vector<SourceSim> sims;
  double cumulative = 0.0;
  for (std::size_t i = 0; i < mix.size(); ++i) {
    const SourceSpec* source = system.find(mix[i].first);
    cumulative += mix[i].second;
    SourceSim sim;
    sim.label = mix[i].first;
    sim.mix_hi = (i + 1 == mix.size()) ? 1.0 : cumulative;
    sim.stream_tag = i + 1;
    double mean = source->mean_photons;
    if (thin_by_partial) mean *= partial_transmittance(system.channel, l_km);
    sim.photons = build_poisson_table(mean);
    sims.push_back(std::move(sim));
  }
  return sims;
}

}  // namespace

const SourceTally* EmpiricalStats::find(SourceLabel label) const {
  for (const auto& t : per_source) {
    if (t.source == label) return &t;
  }
  return nullptr;
}

void validate(const TrialConfig& trial, const SystemParams& system) {
  validate(system);
  if (trial.pulses < 1) throw std::invalid_argument("pulses must be >= 1");
  if (trial.source_mix.empty()) return;
  double sum = 0.0;
  for (std::size_t i = 0; i < trial.source_mix.size(); ++i) {
    const auto& [label, fraction] = trial.source_mix[i];
    if (system.find(label) == nullptr) {
      throw std::invalid_argument("source mix names a source not in the system");
    }
    for (std::size_t j = i + 1; j < trial.source_mix.size(); ++j) {
      if (trial.source_mix[j].first == label) {
        throw std::invalid_argument("source mix labels must be unique");
      }
    }
    if (!(fraction >= 0.0)) {
      throw std::invalid_argument("source mix fractions must be >= 0");
    }
    sum += fraction;
  }
  if (std::fabs(sum - 1.0) > 1e-12) {
    throw std::invalid_argument("source mix fractions must sum to 1");
  }
}

EmpiricalStats simulate_honest(const SystemParams& system,
                               const TrialConfig& trial) {
  validate(trial, system);
  double eta = overall_transmittance(system.channel, system.detector);
  double p_d = system.detector.dark_count;
  double e_d = system.detector.misalignment;

  std::vector<SourceSim> sims = base_sims(system, trial, false, 0.0);
  for (auto& sim : sims) {
    int cutoff = static_cast<int>(sim.photons.cdf.size()) - 1;
    sim.error_cut.resize(cutoff + 1);
    sim.click_cut.resize(cutoff + 1);
    for (int n = 0; n <= cutoff; ++n) {
      sim.error_cut[n] = error_click_prob_given_n(n, eta, p_d, e_d);
      sim.click_cut[n] = click_prob_given_n(n, eta, p_d);
    }
  }

  auto tallies = run_pulses(sims, trial,
                            [](const SourceSim& s, SplitMix64& rng, Tally& t) {
                              int n = s.photons.sample(rng.next_unit());
                              double u = rng.next_unit();
                              if (u < s.error_cut[n]) {
                                ++t.detections;
                                ++t.errors;
                              } else if (u < s.click_cut[n]) {
                                ++t.detections;
                              }
                            });
  return finalize(sims, tallies, true);
}

EmpiricalStats simulate_attack(const AttackStrategy& strategy,
                               const SystemParams& system,
                               const TrialConfig& trial) {
  validate(trial, system);
  double p_d = system.detector.dark_count;
  double e_d = system.detector.misalignment;
  double eta = overall_transmittance(system.channel, system.detector);

  bool pnr = strategy.variant == AttackVariant::PhotonNumberResolving;
  bool intercept = strategy.variant == AttackVariant::InterceptAtDistance;
  if (!pnr &&
      !(strategy.resend_prob >= 0.0 && strategy.resend_prob <= 1.0)) {
    throw RealizabilityError("resend probability eta_f must lie in [0,1]");
  }

  std::vector<SourceSim> sims =
      base_sims(system, trial, intercept, strategy.intercept_km);
  for (auto& sim : sims) {
    int cutoff = static_cast<int>(sim.photons.cdf.size()) - 1;
    sim.half_rule = 0.5 * (4.0 * p_d - 2.0 * p_d * p_d);
    sim.resend.assign(cutoff + 1, 0.0);
    sim.flip.assign(cutoff + 1, 0.0);
    for (int n = 1; n <= cutoff; ++n) {
      if (pnr) {
        PerPhotonAttack per_n = pnr_attack_parameters(n, eta, p_d, e_d);
        if (!per_n.realizable) {
          throw RealizabilityError("pnr attack needs eta_" + std::to_string(n) +
                                   "^f > 1");
        }
        sim.resend[n] = per_n.resend_prob_n;
        sim.flip[n] = per_n.flip_prob_n;
      } else {
        sim.resend[n] = strategy.resend_prob;
        sim.flip[n] = strategy.variant == AttackVariant::NaiveGlobal
                          ? strategy.flip_prob
                          : e_d;
      }
    }
  }

  auto tallies = run_pulses(
      sims, trial, [](const SourceSim& s, SplitMix64& rng, Tally& t) {
        int n = s.photons.sample(rng.next_unit());
        if (n == 0) {
          if (rng.next_unit() < s.half_rule) {
            ++t.detections;
            if (rng.next_unit() < 0.5) ++t.errors;
          }
        } else if (rng.next_unit() < s.resend[n]) {
          if (rng.next_unit() < 0.5) {  // Bob's basis matches Eve's
            ++t.detections;
            if (rng.next_unit() < s.flip[n]) ++t.errors;
          }
        }
      });
  return finalize(sims, tallies, false);
}

ObservedStats simulated_attack_expectation(const AttackStrategy& strategy,
                                           const SourceSpec& source,
                                           const SystemParams& system) {
  if (strategy.variant == AttackVariant::NaiveGlobal) {
    // The sampled model adds the n = 0 rule on top of the naive bookkeeping.
    double dark = -std::expm1(2.0 * std::log1p(-system.detector.dark_count));
    double vac = std::exp(-source.mean_photons) * dark;
    ObservedStats naive =
        naive_observed(source, strategy.resend_prob, strategy.flip_prob);
    return ObservedStats{source.label, naive.observed_gain + vac,
                         naive.observed_error + 0.5 * vac};
  }
  if (strategy.variant == AttackVariant::PhotonNumberResolving) {
    return pnr_observed(source,
                        overall_transmittance(system.channel, system.detector),
                        system.detector.dark_count,
                        system.detector.misalignment);
  }
  return observed_stats(strategy, source, system);
}

FluctuationReport fluctuation_check(const SystemParams& system,
                                    const SessionStats& stats,
                                    std::uint64_t trials,
                                    std::uint64_t scaled_pulses,
                                    std::uint64_t seed) {
  validate(system);
  validate(stats);
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (scaled_pulses < 1) throw std::invalid_argument("scaled pulses must be >= 1");

  double eta = overall_transmittance(system.channel, system.detector);
  FluctuationReport report;
  report.scaled_pulses = scaled_pulses;
  report.sessions = trials;

  for (std::size_t ordinal = 0; ordinal < system.sources.size(); ++ordinal) {
    const SourceSpec& source = system.sources[ordinal];
    double p = expected_gain(source, eta, system.detector.dark_count);
    SessionStats scaled{static_cast<double>(scaled_pulses),
                        stats.confidence_exponent,
                        {}};
    FluctuationSourceReport r;
    r.source = source.label;
    r.expected_gain = p;
    r.window = acceptance_window(p, scaled).interval;
    r.bound_q = std::exp(-stats.confidence_exponent);
    r.predicted_sd =
        std::sqrt(p * (1.0 - p) / static_cast<double>(scaled_pulses));
    r.session_rates.reserve(trials);

    double sum = 0.0;
    for (std::uint64_t t = 0; t < trials; ++t) {
      TrialConfig session{scaled_pulses,
                          stream_key(seed, kSessionTag + ordinal, t),
                          {{source.label, 1.0}},
                          0};
      EmpiricalStats stats_t = simulate_honest(system, session);
      double rate = stats_t.find(source.label)->gain_estimate;
      r.session_rates.push_back(rate);
      sum += rate;
      if (!r.window.contains(rate)) ++r.outliers;
    }
    r.outlier_fraction =
        static_cast<double>(r.outliers) / static_cast<double>(trials);
    if (trials > 1) {
      double mean = sum / static_cast<double>(trials);
      double ss = 0.0;
      for (double rate : r.session_rates) ss += (rate - mean) * (rate - mean);
      r.empirical_sd = std::sqrt(ss / static_cast<double>(trials - 1));
    }
    report.per_source.push_back(std::move(r));
  }
  return report;
}

}  // namespace qkdfs
