#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "qkdfs/stats.hpp"

using namespace qkdfs;

namespace {
const SessionStats kPaperStats{1e10, 25.0, {}};
}

TEST_CASE("deviation bound") {
  CHECK(deviation_bound(0.0, kPaperStats) == 0.0);
  CHECK(deviation_bound(1.0, kPaperStats) == 1e-4);  // 1e-4 sqrt(p) at p = 1
  CHECK(deviation_bound(6.680e-5, kPaperStats) ==
        doctest::Approx(8.173126696681020e-7).epsilon(1e-14));
  CHECK(deviation_bound(6.67928293154097e-5, kPaperStats) ==
        doctest::Approx(8.172688010404514e-7).epsilon(1e-14));
  CHECK_THROWS_AS(deviation_bound(1.5, kPaperStats), std::invalid_argument);
}

TEST_CASE("deviation bound inverse-square-root scaling") {
  SessionStats quad{4e10, 25.0, {}};
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> p_dist(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    double p = p_dist(rng);
    CHECK(deviation_bound(p, quad) == deviation_bound(p, kPaperStats) / 2.0);
  }
}

TEST_CASE("acceptance window construction") {
  AcceptanceWindow w = acceptance_window(6.680e-5, kPaperStats);
  CHECK(w.center == 6.680e-5);
  CHECK(w.half_width == deviation_bound(6.680e-5, kPaperStats));
  CHECK(w.interval.contains(w.center));
  CHECK(w.interval.lo() == w.center - w.half_width);
  CHECK(w.interval.hi() == w.center + w.half_width);
  CHECK(w.interval.lo() == doctest::Approx(6.598e-5).epsilon(1e-4));
  CHECK(w.interval.hi() == doctest::Approx(6.761e-5).epsilon(1e-4));

  AcceptanceWindow zero = acceptance_window(0.0, kPaperStats);
  CHECK(zero.interval.lo() == 0.0);
  CHECK(zero.interval.hi() == 0.0);

  AcceptanceWindow err = acceptance_window(2.998e-6, kPaperStats);
  CHECK(err.interval.lo() == doctest::Approx(2.825e-6).epsilon(1e-3));
  CHECK(err.interval.hi() == doctest::Approx(3.171e-6).epsilon(1e-3));

  // clamping at the top of the probability range
  AcceptanceWindow top = acceptance_window(1.0, kPaperStats);
  CHECK(top.interval.hi() == 1.0);
  CHECK(top.interval.lo() == 1.0 - 1e-4);
}

TEST_CASE("interval intersection examples") {
  CHECK(intersect(Interval::closed(1, 2), Interval::closed(3, 4)).is_empty());
  CHECK(intersect(Interval::closed(3.467e-4, 3.553e-4),
                  Interval::closed(3.106e-4, 3.252e-4))
            .is_empty());
  Interval x = intersect(Interval::closed(8.894e-2, 9.120e-2),
                         Interval::closed(8.775e-2, 9.229e-2));
  CHECK(x.lo() == 8.894e-2);
  CHECK(x.hi() == 9.120e-2);
}

TEST_CASE("interval algebra properties") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto random_interval = [&]() {
    if (u(rng) < -0.8) return Interval::empty();
    double a = u(rng);
    double b = u(rng);
    return Interval::closed(std::min(a, b), std::max(a, b));
  };
  for (int i = 0; i < 500; ++i) {
    Interval a = random_interval();
    Interval b = random_interval();
    Interval c = random_interval();
    CHECK(intersect(a, b) == intersect(b, a));
    CHECK(intersect(a, intersect(b, c)) == intersect(intersect(a, b), c));
    CHECK(intersect(a, a) == a);
    CHECK(intersect(a, Interval::empty()).is_empty());
  }
}

TEST_CASE("interval accessors guard the empty state") {
  Interval e = Interval::empty();
  CHECK(e.is_empty());
  CHECK_FALSE(e.contains(0.0));
  CHECK_THROWS_AS(e.lo(), std::logic_error);
  CHECK_THROWS_AS(e.hi(), std::logic_error);
  CHECK(Interval::closed(2.0, 1.0).is_empty());
}

TEST_CASE("per-source pulse budget override") {
  SessionStats stats{1e10, 25.0, {{SourceLabel::Decoy, 2.5e9}}};
  CHECK(stats.for_source(SourceLabel::Signal).pulse_count == 1e10);
  CHECK(stats.for_source(SourceLabel::Decoy).pulse_count == 2.5e9);
  // quarter budget doubles the deviation
  CHECK(deviation_bound(0.25, stats.for_source(SourceLabel::Decoy)) ==
        2.0 * deviation_bound(0.25, stats.for_source(SourceLabel::Signal)));
}

TEST_CASE("session stats validation") {
  CHECK_THROWS_AS(validate(SessionStats{0.0, 25.0, {}}), std::invalid_argument);
  CHECK_THROWS_AS(validate(SessionStats{1.5, 25.0, {}}), std::invalid_argument);
  CHECK_THROWS_AS(validate(SessionStats{1e10, 0.0, {}}), std::invalid_argument);
  CHECK_THROWS_AS(validate(SessionStats{1e10, 25.0, {{SourceLabel::Decoy, 0.0}}}),
                  std::invalid_argument);
}
