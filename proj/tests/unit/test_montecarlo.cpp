#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qkdfs/honest.hpp"
#include "qkdfs/montecarlo.hpp"

using namespace qkdfs;

namespace {

SystemParams baseline() {
  SystemParams sys;
  sys.channel = ChannelParams{0.21, 120.0};
  sys.detector = DetectorParams{0.045, 8.5e-7, 0.033};
  sys.sources = {SourceSpec{SourceLabel::Signal, 0.479},
                 SourceSpec{SourceLabel::Decoy, 0.127}};
  return sys;
}

// eta = 0.1 link with ideal detectors: length 0, eta_bob = 0.1.
SystemParams clean_link(double eta, double mean) {
  SystemParams sys;
  sys.channel = ChannelParams{0.21, 0.0};
  sys.detector = DetectorParams{eta, 0.0, 0.0};
  sys.sources = {SourceSpec{SourceLabel::Signal, mean}};
  return sys;
}

double gain_se(double p, double n) { return std::sqrt(p * (1.0 - p) / n); }

}  // namespace

TEST_CASE("determinism: identical config and seed give identical counts") {
  SystemParams sys = baseline();
  TrialConfig trial{1'000'000, 123, {}, 2};
  EmpiricalStats a = simulate_honest(sys, trial);
  EmpiricalStats b = simulate_honest(sys, trial);
  REQUIRE(a.per_source.size() == b.per_source.size());
  for (std::size_t i = 0; i < a.per_source.size(); ++i) {
    CHECK(a.per_source[i].pulses_sent == b.per_source[i].pulses_sent);
    CHECK(a.per_source[i].detections == b.per_source[i].detections);
    CHECK(a.per_source[i].errors == b.per_source[i].errors);
  }
}

TEST_CASE("counts are independent of the worker count") {
  SystemParams sys = baseline();
  for (bool attack : {false, true}) {
    TrialConfig one{2'000'000, 99, {}, 1};
    TrialConfig four{2'000'000, 99, {}, 4};
    AttackStrategy s{AttackVariant::InterceptAtDistance, 9.007e-2, 0.0, 120.0};
    EmpiricalStats a = attack ? simulate_attack(s, sys, one)
                              : simulate_honest(sys, one);
    EmpiricalStats b = attack ? simulate_attack(s, sys, four)
                              : simulate_honest(sys, four);
    for (std::size_t i = 0; i < a.per_source.size(); ++i) {
      CHECK(a.per_source[i].pulses_sent == b.per_source[i].pulses_sent);
      CHECK(a.per_source[i].detections == b.per_source[i].detections);
      CHECK(a.per_source[i].errors == b.per_source[i].errors);
    }
  }
}

TEST_CASE("honest rate matches the closed form on a clean link") {
  SystemParams sys = clean_link(0.1, 0.5);
  TrialConfig trial{1'000'000, 7, {}, 0};
  EmpiricalStats stats = simulate_honest(sys, trial);
  const SourceTally* t = stats.find(SourceLabel::Signal);
  REQUIRE(t != nullptr);
  double expected = 4.877057549928599e-2;  // 1 - e^(-0.05)
  double se = gain_se(expected, double(t->pulses_sent));
  CHECK(std::fabs(t->gain_estimate - expected) <= 5.0 * se);
  CHECK(t->errors == 0);  // no dark counts, no misalignment
}

TEST_CASE("vacuum source with no dark counts never clicks") {
  SystemParams sys;
  sys.channel = ChannelParams{0.21, 0.0};
  sys.detector = DetectorParams{1.0, 0.0, 0.0};
  sys.sources = {SourceSpec{SourceLabel::Signal, 0.0}};
  EmpiricalStats stats = simulate_honest(sys, TrialConfig{200'000, 5, {}, 0});
  CHECK(stats.find(SourceLabel::Signal)->detections == 0);
}

TEST_CASE("honest rates at baseline parameters") {
  SystemParams sys = baseline();
  TrialConfig trial{10'000'000, 11, {}, 0};
  EmpiricalStats stats = simulate_honest(sys, trial);
  for (const SourceSpec& src : sys.sources) {
    HonestExpectation he = honest_expectation(src, sys);
    const SourceTally* t = stats.find(src.label);
    double n = double(t->pulses_sent);
    CHECK(std::fabs(t->gain_estimate - he.gain) <=
          5.0 * gain_se(he.gain, n));
    double se_err = 0.5 * gain_se(2.0 * he.error_gain, n);
    CHECK(std::fabs(t->error_gain_estimate - he.error_gain) <= 5.0 * se_err);
  }
}

TEST_CASE("naive attack with eta_f = 0 yields only vacuum-rule clicks") {
  SystemParams sys = baseline();
  AttackStrategy naive{AttackVariant::NaiveGlobal, 0.0, 0.3, 0.0};
  EmpiricalStats stats =
      simulate_attack(naive, sys, TrialConfig{20'000'000, 21, {}, 0});
  for (const SourceSpec& src : sys.sources) {
    const SourceTally* t = stats.find(src.label);
    ObservedStats ref = simulated_attack_expectation(naive, src, sys);
    // the reference is exactly the vacuum-rule term here
    CHECK(ref.observed_gain ==
          doctest::Approx(std::exp(-src.mean_photons) *
                          (2.0 * 8.5e-7 - 8.5e-7 * 8.5e-7))
              .epsilon(1e-9));
    double se = gain_se(ref.observed_gain, double(t->pulses_sent));
    CHECK(std::fabs(t->gain_estimate - ref.observed_gain) <= 5.0 * se);
  }

  // and with p_d = 0 as well, there are no clicks at all
  sys.detector.dark_count = 0.0;
  EmpiricalStats none =
      simulate_attack(naive, sys, TrialConfig{200'000, 3, {}, 0});
  CHECK(none.find(SourceLabel::Signal)->detections == 0);
  CHECK(none.find(SourceLabel::Decoy)->detections == 0);
}

TEST_CASE("naive attack with no dark counts matches the naive bookkeeping") {
  SystemParams sys = baseline();
  sys.detector.dark_count = 0.0;
  AttackStrategy naive{AttackVariant::NaiveGlobal, 3.511e-4, 0.045, 0.0};
  TrialConfig trial{20'000'000, 31, {}, 0};
  EmpiricalStats stats = simulate_attack(naive, sys, trial);
  for (const SourceSpec& src : sys.sources) {
    ObservedStats ref = naive_observed(src, 3.511e-4, 0.045);
    const SourceTally* t = stats.find(src.label);
    double n = double(t->pulses_sent);
    CHECK(std::fabs(t->gain_estimate - ref.observed_gain) <=
          5.0 * gain_se(ref.observed_gain, n));
    CHECK(std::fabs(t->error_gain_estimate - ref.observed_error) <=
          5.0 * gain_se(ref.observed_error, n));
  }
}

TEST_CASE("pnr attack reproduces the honest rates") {
  SystemParams sys = baseline();
  AttackStrategy pnr{AttackVariant::PhotonNumberResolving, 0.0, 0.0, 0.0};
  TrialConfig trial{10'000'000, 41, {}, 0};
  EmpiricalStats stats = simulate_attack(pnr, sys, trial);
  for (const SourceSpec& src : sys.sources) {
    HonestExpectation he = honest_expectation(src, sys);
    const SourceTally* t = stats.find(src.label);
    double n = double(t->pulses_sent);
    CHECK(std::fabs(t->gain_estimate - he.gain) <= 5.0 * gain_se(he.gain, n));
    CHECK(std::fabs(t->error_gain_estimate - he.error_gain) <=
          5.0 * gain_se(he.error_gain, n));
  }
}

TEST_CASE("intercept attack at 120 km matches its closed form") {
  SystemParams sys = baseline();
  AttackStrategy s{AttackVariant::InterceptAtDistance, 9.007e-2, 0.0, 120.0};
  TrialConfig trial{10'000'000, 51, {}, 0};
  EmpiricalStats stats = simulate_attack(s, sys, trial);
  const SourceTally* t = stats.find(SourceLabel::Signal);
  double expected = 6.679613497315056e-5;
  CHECK(std::fabs(t->gain_estimate - expected) <=
        5.0 * gain_se(expected, double(t->pulses_sent)));
}

TEST_CASE("realizability is rejected before sampling") {
  SystemParams sys = clean_link(1.0, 0.5);  // eta = 1, lossless
  AttackStrategy pnr{AttackVariant::PhotonNumberResolving, 0.0, 0.0, 0.0};
  CHECK_THROWS_AS(simulate_attack(pnr, sys, TrialConfig{1000, 1, {}, 0}),
                  RealizabilityError);
}

TEST_CASE("counter sanity") {
  SystemParams sys = baseline();
  AttackStrategy s{AttackVariant::VacuumSplit, 2.928e-4, 0.0, 0.0};
  EmpiricalStats stats =
      simulate_attack(s, sys, TrialConfig{3'000'000, 61, {}, 0});
  std::uint64_t total = 0;
  for (const auto& t : stats.per_source) {
    CHECK(t.errors <= t.detections);
    CHECK(t.detections <= t.pulses_sent);
    total += t.pulses_sent;
  }
  CHECK(total == 3'000'000);
}

TEST_CASE("trial config validation") {
  SystemParams sys = baseline();
  TrialConfig bad_sum{1000, 0, {{SourceLabel::Signal, 0.6}}, 0};
  CHECK_THROWS_AS(validate(bad_sum, sys), std::invalid_argument);
  TrialConfig unknown{1000, 0, {{SourceLabel::Vacuum, 1.0}}, 0};
  CHECK_THROWS_AS(validate(unknown, sys), std::invalid_argument);
  TrialConfig zero{0, 0, {}, 0};
  CHECK_THROWS_AS(validate(zero, sys), std::invalid_argument);
}

TEST_CASE("fluctuation check on a reduced session") {
  SystemParams sys = baseline();
  sys.sources.pop_back();  // signal only, keeps the runtime down
  SessionStats stats{1e10, 2.0, {}};
  FluctuationReport rep = fluctuation_check(sys, stats, 50, 1'000'000, 17);
  REQUIRE(rep.per_source.size() == 1);
  const FluctuationSourceReport& r = rep.per_source[0];
  CHECK(rep.sessions == 50);
  CHECK(r.session_rates.size() == 50);
  // exp(-2) bound with a 3x safety margin
  CHECK(r.outlier_fraction <= 3.0 * r.bound_q);
  CHECK(r.empirical_sd == doctest::Approx(r.predicted_sd).epsilon(0.35));

  // one-session report carries exactly one rate
  FluctuationReport single = fluctuation_check(sys, stats, 1, 100'000, 5);
  CHECK(single.per_source[0].session_rates.size() == 1);

  // a 25-exponent window is far in the tail: no outliers
  SessionStats wide{1e10, 25.0, {}};
  FluctuationReport quiet = fluctuation_check(sys, wide, 20, 1'000'000, 29);
  CHECK(quiet.per_source[0].outliers == 0);
}
