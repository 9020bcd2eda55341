#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "qkdfs/attacks.hpp"
#include "qkdfs/honest.hpp"
#include "support/oracle.hpp"

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

const SourceSpec kSignal{SourceLabel::Signal, 0.479};
const SourceSpec kDecoy{SourceLabel::Decoy, 0.127};

}  // namespace

TEST_CASE("naive observed statistics") {
  ObservedStats mid = naive_observed(kSignal, 3.511e-4, 0.045);
  CHECK(mid.observed_gain == doctest::Approx(6.68138938121791e-5).epsilon(1e-12));
  CHECK(mid.observed_error == 0.045 * mid.observed_gain);

  ObservedStats off = naive_observed(kSignal, 0.0, 0.2);
  CHECK(off.observed_gain == 0.0);
  CHECK(off.observed_error == 0.0);

  ObservedStats decoy = naive_observed(kDecoy, 3.179e-4, 0.0);
  CHECK(decoy.observed_gain ==
        doctest::Approx(1.8957382740681903e-5).epsilon(1e-12));
  CHECK(decoy.observed_error == 0.0);
}

TEST_CASE("per-photon-number attack parameters") {
  PerPhotonAttack one = pnr_attack_parameters(1, 1.359e-4, 8.5e-7, 0.033);
  CHECK(one.resend_prob_n ==
        doctest::Approx(2.7519953649519636e-4).epsilon(1e-13));
  CHECK(one.realizable);
  CHECK(one.flip_prob_n >= 0.0);
  CHECK(one.flip_prob_n <= 0.5);

  PerPhotonAttack vac = pnr_attack_parameters(0, 1.359e-4, 8.5e-7, 0.033);
  double p_d = 8.5e-7;
  CHECK(vac.vacuum_prep_prob == 4.0 * p_d - 2.0 * p_d * p_d);
  CHECK(std::fabs(vac.resend_prob_n - vac.vacuum_prep_prob) <= 1e-21);
  CHECK(vac.flip_prob_n == 0.5);  // random bit values

  // Degenerate lossless case: the formula demands resending twice per pulse.
  PerPhotonAttack bad = pnr_attack_parameters(1, 1.0, 0.0, 0.0);
  CHECK(bad.resend_prob_n == 2.0);
  CHECK_FALSE(bad.realizable);
}

TEST_CASE("pnr mixture reproduces the honest statistics") {
  SystemParams sys = baseline();
  double eta = overall_transmittance(sys.channel, sys.detector);
  double p_d = sys.detector.dark_count;
  double e_d = sys.detector.misalignment;

  for (const SourceSpec& src : sys.sources) {
    ObservedStats obs = pnr_observed(src, eta, p_d, e_d);
    HonestExpectation he = honest_expectation(src, sys);
    CHECK(std::fabs(obs.observed_gain - he.gain) <= 1e-12);
    CHECK(std::fabs(obs.observed_error - he.error_gain) <= 1e-12);
  }

  // identity across an intensity grid
  for (int i = 1; i <= 50; ++i) {
    SourceSpec probe{SourceLabel::Signal, 2.0 * i / 50.0};
    ObservedStats obs = pnr_observed(probe, eta, p_d, e_d);
    CHECK(std::fabs(obs.observed_gain - expected_gain(probe, eta, p_d)) <= 1e-12);
    CHECK(std::fabs(obs.observed_error -
                    expected_error_gain(probe, eta, p_d, e_d)) <= 1e-12);
  }

  // vacuum: the rule alone, halved by the basis match
  ObservedStats vac = pnr_observed(SourceSpec{SourceLabel::Vacuum, 0.0}, eta,
                                   p_d, e_d);
  CHECK(std::fabs(vac.observed_gain - (2.0 * p_d - p_d * p_d)) <= 1e-21);
}

TEST_CASE("pnr propagates realizability violations") {
  CHECK_THROWS_AS(pnr_observed(kSignal, 1.0, 0.0, 0.0), RealizabilityError);
}

TEST_CASE("vacuum-split observed statistics") {
  double p_d = 8.5e-7;
  ObservedStats sig = vacuum_split_observed(kSignal, 3.455e-4, p_d, 0.033);
  CHECK(sig.observed_gain == doctest::Approx(6.68012045457784e-5).epsilon(1e-12));

  ObservedStats dec = vacuum_split_observed(kDecoy, 2.928e-4, p_d, 0.033);
  CHECK(dec.observed_gain ==
        doctest::Approx(1.8957836938861312e-5).epsilon(1e-12));

  // Pure dark-count mimicry on a vacuum source.
  ObservedStats vac = vacuum_split_observed(SourceSpec{SourceLabel::Vacuum, 0.0},
                                            0.7, p_d, 0.033);
  CHECK(std::fabs(vac.observed_gain - (2.0 * p_d - p_d * p_d)) <= 1e-21);
  CHECK(vac.observed_error == 0.5 * vac.observed_gain);
}

TEST_CASE("vacuum-split error form against the direct expression") {
  std::mt19937_64 rng(31337);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    double mean = 2.0 * u(rng);
    double eta_f = u(rng);
    double p_d = 0.01 * u(rng);
    double e_d = 0.5 * u(rng);
    ObservedStats obs = vacuum_split_observed(SourceSpec{SourceLabel::Signal, mean},
                                              eta_f, p_d, e_d);
    long double dark = 1.0L - (1.0L - (long double)p_d) * (1.0L - (long double)p_d);
    long double gain = expl(-(long double)mean) * dark +
                       0.5L * eta_f * (1.0L - expl(-(long double)mean));
    long double err = 0.5L * expl(-(long double)mean) * dark +
                      0.5L * e_d * eta_f * (1.0L - expl(-(long double)mean));
    CHECK(std::fabs(obs.observed_gain - double(gain)) <= 1e-15);
    CHECK(std::fabs(obs.observed_error - double(err)) <= 1e-15);
    CHECK(obs.observed_error <= obs.observed_gain);
  }
}

TEST_CASE("intercept observed statistics") {
  SystemParams sys = baseline();
  ObservedStats sig = intercept_observed(kSignal, 9.007e-2, 120.0, sys);
  CHECK(sig.observed_gain ==
        doctest::Approx(6.679613497315056e-5).epsilon(1e-12));
  ObservedStats dec = intercept_observed(kDecoy, 9.001e-2, 120.0, sys);
  CHECK(dec.observed_gain ==
        doctest::Approx(1.8956979491911325e-5).epsilon(1e-12));
  CHECK_THROWS_AS(intercept_observed(kSignal, 0.1, 121.0, sys),
                  std::invalid_argument);
}

TEST_CASE("intercept at l = 0 reduces to vacuum split") {
  SystemParams sys = baseline();
  std::mt19937_64 rng(2718);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    SourceSpec src{SourceLabel::Signal, 2.0 * u(rng)};
    double eta_f = u(rng);
    sys.detector.dark_count = 0.01 * u(rng);
    sys.detector.misalignment = 0.5 * u(rng);
    ObservedStats a = intercept_observed(src, eta_f, 0.0, sys);
    ObservedStats b = vacuum_split_observed(src, eta_f, sys.detector.dark_count,
                                            sys.detector.misalignment);
    CHECK(a.observed_gain == b.observed_gain);
    CHECK(a.observed_error == b.observed_error);
  }
}

TEST_CASE("observed error never exceeds observed gain") {
  SystemParams sys = baseline();
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    SourceSpec src{SourceLabel::Signal, 2.0 * u(rng)};
    AttackStrategy s;
    switch (i % 3) {
      case 0:
        s = AttackStrategy{AttackVariant::NaiveGlobal, u(rng), u(rng), 0.0};
        break;
      case 1:
        s = AttackStrategy{AttackVariant::VacuumSplit, u(rng), 0.0, 0.0};
        break;
      default:
        s = AttackStrategy{AttackVariant::InterceptAtDistance, u(rng), 0.0,
                           120.0 * u(rng)};
        break;
    }
    ObservedStats obs = observed_stats(s, src, sys);
    CHECK(obs.observed_error >= 0.0);
    CHECK(obs.observed_error <= obs.observed_gain);
  }
}

TEST_CASE("strategy dispatch") {
  SystemParams sys = baseline();
  AttackStrategy pnr{AttackVariant::PhotonNumberResolving, 0.0, 0.0, 0.0};
  ObservedStats obs = observed_stats(pnr, kSignal, sys);
  CHECK(obs.observed_gain ==
        doctest::Approx(6.67928293154097e-5).epsilon(1e-12));
}
