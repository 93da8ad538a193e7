#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "aoimds/aoi_analysis.h"
#include "aoimds/erasure_distribution.h"
#include "aoimds/simulator.h"

namespace aoimds {
namespace {

const GEParams kFig3{0.2, 0.8, 0.2, 0.9};

SimConfig make(std::int64_t K, std::int64_t ell, int n, int k, const GEParams& ch,
               std::int64_t rounds, std::uint64_t seed) {
  SimConfig c;
  c.system = SystemConfig::create(K, ell, n, k);
  c.channel = ch;
  c.coded = true;
  c.rounds = rounds;
  c.seed = seed;
  return c;
}

// Oracle for a memoryless channel (alpha + beta = 1): the expected age at
// time t is a mixture over which earlier packet of the source was the last
// one delivered, and it is linear between delivery instants. Integrating over
// one period of the schedule gives the exact long-run mean age, including the
// offset after a block recovery.
double exact_mean_age(std::int64_t K, std::int64_t ell, int n, int k, double pe,
                      std::int64_t src, bool paper) {
  const double bep = bep_mds(n - 1, k, GEParams{0.5, 0.5, pe, pe});
  const double pa = 1 - pe, pb = pe * (1 - bep), pc = pe * bep;
  struct Times {
    double direct, recovery, direct_age, recovery_age;
  };
  const auto sched = [&](std::int64_t m) {
    const std::int64_t d = m * K + src;
    const std::int64_t b = d / k, p = d % k;
    return Times{static_cast<double>(b * n * ell + (p + 1) * ell),
                 static_cast<double>((b + 1) * n * ell), static_cast<double>(ell),
                 static_cast<double>((n - p + (paper ? 1 : 0)) * ell)};
  };
  const std::int64_t period = k / std::gcd(K, static_cast<std::int64_t>(k));
  const int depth = 80;  // pc^depth is far below double resolution here
  const std::int64_t m0 = depth + 2;
  const double t0 = sched(m0).direct, t1 = sched(m0 + period).direct;
  std::set<double> cuts{t0, t1};
  for (std::int64_t m = m0 - depth; m <= m0 + period + 1; ++m) {
    for (double x : {sched(m).direct, sched(m).recovery}) {
      if (x > t0 && x < t1) cuts.insert(x);
    }
  }
  const auto expected_age = [&](double t) {
    double total = 0.0, none_later = 1.0;
    for (std::int64_t m = m0 + period + 1; m >= m0 - depth; --m) {
      const Times s = sched(m);
      if (s.direct > t) continue;
      if (s.recovery <= t) {
        total += none_later * (pa * (t - s.direct + s.direct_age) +
                               pb * (t - s.recovery + s.recovery_age));
        none_later *= pc;
      } else {
        total += none_later * pa * (t - s.direct + s.direct_age);
        none_later *= 1 - pa;
      }
    }
    return total;
  };
  double area = 0.0;
  for (auto it = cuts.begin(); std::next(it) != cuts.end(); ++it) {
    const double a = *it, b = *std::next(it);
    area += (b - a) * expected_age(0.5 * (a + b));
  }
  return area / (t1 - t0);
}

TEST(ExactAgeOracle, ReproducesKnownCases) {
  EXPECT_NEAR(exact_mean_age(12, 1, 4, 3, 0.0, 0, true), 9.0, 1e-12);
  EXPECT_NEAR(exact_mean_age(10, 1, 1, 1, 0.34, 3, true),
              uncoded_aoi(10, 1, 0.34, UncodedMode::kExact).mean_aoi, 1e-9);
}

TEST(SimConfig, Validation) {
  SimConfig c = make(12, 1, 4, 3, kFig3, 100, 1);
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.effective_warmup(), 10);
  c.rounds = 5000;
  EXPECT_EQ(c.effective_warmup(), 500);
  c.warmup_rounds = 5000;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.warmup_rounds.reset();
  c.tracked_sources = {1, 1};
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.tracked_sources = {12};
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.tracked_sources.clear();
  c.rounds = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  EXPECT_THROW(make(2, 1, 4, 3, kFig3, 100, 1).validate(), std::invalid_argument);
  EXPECT_EQ(make(12, 1, 4, 3, kFig3, 100, 1).effective_tracked(),
            (std::vector<std::int64_t>{0, 1, 2}));
}

TEST(Simulator, PerfectChannelUncoded) {
  SimConfig c;
  c.system = SystemConfig::uncoded(10, 1);
  c.channel = {0.5, 0.5, 0.0, 0.0};
  c.coded = false;
  c.rounds = 1000;
  for (std::uint64_t seed : {1u, 2u, 99u}) {
    c.seed = seed;
    const SimReport r = simulate(c);
    ASSERT_EQ(r.sources.size(), 1u);
    EXPECT_EQ(r.sources[0].mean_aoi(), 6.0);
    EXPECT_EQ(r.sources[0].mean_x(), 10.0);
  }
}

TEST(Simulator, PerfectChannelCoded) {
  const SimReport r = simulate(make(12, 1, 4, 3, {0.5, 0.5, 0.0, 0.0}, 500, 8));
  ASSERT_EQ(r.sources.size(), 3u);
  for (const SourceStats& s : r.sources) {
    EXPECT_EQ(s.mean_aoi(), 9.0);
    EXPECT_EQ(s.mean_x(), 16.0);
    EXPECT_EQ(s.recoveries, 0);
  }
  EXPECT_EQ(r.events.b + r.events.c, 0);
}

TEST(Simulator, DeadChannelFlagsNoDelivery) {
  SimConfig c;
  c.system = SystemConfig::uncoded(4, 1);
  c.channel = {0.5, 0.5, 1.0, 1.0};
  c.coded = false;
  c.rounds = 300;
  EXPECT_TRUE(simulate(c).no_delivery);
  EXPECT_TRUE(simulate(make(6, 1, 4, 2, {0.5, 0.5, 1.0, 1.0}, 300, 1)).no_delivery);
}

TEST(Simulator, DeterministicForEqualSeeds) {
  SimConfig c = make(20, 2, 7, 5, {0.1, 0.3, 0.05, 0.6}, 4000, 123);
  c.record_trace = true;
  const SimReport a = simulate(c);
  EXPECT_EQ(a, simulate(c));
  c.seed = 124;
  EXPECT_NE(a, simulate(c));
}

TEST(Simulator, ReplicationsIndependentOfThreadCount) {
  const SimConfig c = make(20, 1, 7, 5, kFig3, 2000, 40);
  const SimReport one = simulate_replicated(c, 5, 1);
  EXPECT_EQ(one, simulate_replicated(c, 5, 3));
  EXPECT_EQ(one, simulate_replicated(c, 5, 8));
  SimReport manual = simulate([&] { SimConfig x = c; x.seed = 40; return x; }());
  for (std::uint64_t s = 41; s < 45; ++s) {
    SimConfig x = c;
    x.seed = s;
    merge_into(manual, simulate(x));
  }
  EXPECT_EQ(one, manual);
}

TEST(Simulator, SawtoothIntegrity) {
  SimConfig c = make(15, 3, 6, 5, {0.1, 0.25, 0.05, 0.8}, 800, 17);
  c.record_trace = true;
  const SimReport r = simulate(c);
  for (const SourceStats& s : r.sources) {
    const auto& resets = s.trace.resets;
    ASSERT_GE(resets.size(), 2u);
    EXPECT_EQ(polygon_twice_area(resets), s.trace.twice_area);
    EXPECT_EQ(resets.back().time - resets.front().time, s.trace.elapsed);
    // Per-slot integration: age climbs by one per slot between resets.
    std::int64_t twice = 0;
    std::size_t next = 1;
    std::int64_t age = resets.front().value;
    for (std::int64_t t = resets.front().time; t < resets.back().time; ++t) {
      twice += 2 * age + 1;
      ++age;
      if (next < resets.size() && resets[next].time == t + 1) {
        EXPECT_LE(resets[next].value, age);
        age = resets[next++].value;
      }
    }
    EXPECT_EQ(twice, s.trace.twice_area);
    // Reset values: ell after a direct delivery, (n + 1 - p) ell after recovery.
    const std::int64_t recovery_age = (6 + 1 - s.position) * 3;
    std::int64_t recoveries = 0;
    for (std::size_t j = 1; j < resets.size(); ++j) {
      ASSERT_TRUE(resets[j].value == 3 || resets[j].value == recovery_age);
      recoveries += resets[j].value == recovery_age;
    }
    EXPECT_EQ(recoveries, s.recoveries);
  }
}

TEST(Simulator, EventFrequenciesAndHistogramSumUp) {
  const SimReport r = simulate(make(30, 1, 10, 6, kFig3, 3000, 5));
  EXPECT_NEAR(r.freq_a() + r.freq_b() + r.freq_c(), 1.0, 1e-12);
  EXPECT_EQ(std::accumulate(r.erasure_histogram.begin(), r.erasure_histogram.end(),
                            std::int64_t{0}),
            r.blocks);
  EXPECT_EQ(r.events.total(), r.blocks * 6);
  for (const SourceStats& s : r.sources) EXPECT_GE(s.mean_aoi(), 1.0);
}

TEST(Simulator, UncodedMatchesLemmaTwo) {
  SimConfig c;
  c.system = SystemConfig::uncoded(100, 1);
  c.channel = kFig3;
  c.coded = false;
  c.rounds = 100000;
  c.seed = 3;
  const SimReport r = simulate(c);
  const double want = uncoded_aoi(100, 1, 0.34, UncodedMode::kExact).mean_aoi;
  EXPECT_NEAR(want, 102.51515151515152, 1e-9);
  EXPECT_LT(std::abs(r.sources[0].mean_aoi() - want) / want, 0.03);
}

TEST(Simulator, FullRateCodeMatchesUncoded) {
  // k = n: both systems see the same per-packet law. Compare the two
  // empirical means within 3 combined standard errors of E[X]-based
  // estimates, using independent seeds.
  SimConfig u;
  u.system = SystemConfig::uncoded(20, 1);
  u.channel = kFig3;
  u.coded = false;
  u.rounds = 60000;
  u.seed = 10;
  const SimConfig c = make(20, 1, 5, 5, kFig3, 60000, 11);
  const SimReport ru = simulate(u), rc = simulate(c);
  const SourceStats& a = ru.sources[0];
  for (const SourceStats& b : rc.sources) {
    const double se = std::hypot(a.se_x(), b.se_x());
    EXPECT_LT(std::abs(a.mean_x() - b.mean_x()), 3 * se);
    EXPECT_EQ(b.recoveries, 0);
  }
  const double want = uncoded_aoi(20, 1, 0.34, UncodedMode::kExact).mean_aoi;
  for (const SourceStats& b : rc.sources) {
    EXPECT_LT(std::abs(b.mean_aoi() - want) / want, 0.01);
  }
}

TEST(Simulator, MatchesExactAgeOracleFixedPositions) {
  for (bool paper : {true, false}) {
    SimConfig c = make(12, 1, 4, 3, kFig3, 300000, 21);
    c.recovery_age_offset = paper ? RecoveryAgeOffset::kPaper : RecoveryAgeOffset::kGeometric;
    const SimReport r = simulate(c);
    for (const SourceStats& s : r.sources) {
      const double want = exact_mean_age(12, 1, 4, 3, 0.34, s.source, paper);
      EXPECT_LT(std::abs(s.mean_aoi() - want) / want, 0.005)
          << "source " << s.source << " paper=" << paper;
    }
  }
}

TEST(Simulator, MatchesExactAgeOracleRotatingPositions) {
  const SimConfig c = make(10, 2, 5, 3, kFig3, 200000, 22);
  const SimReport r = simulate(c);
  for (const SourceStats& s : r.sources) {
    EXPECT_EQ(s.position, -1);
    const double want = exact_mean_age(10, 2, 5, 3, 0.34, s.source, true);
    EXPECT_LT(std::abs(s.mean_aoi() - want) / want, 0.005) << "source " << s.source;
  }
}

TEST(Simulator, RecoveryOffsetExceedsTheoremOne) {
  // The exact age sits above Theorem 1 because a recovered packet resets the
  // age to (n + 1 - p) ell, not ell.
  const SystemConfig sys = SystemConfig::create(12, 1, 4, 3);
  for (std::int64_t i = 0; i < 3; ++i) {
    const double thm = coded_aoi_exact(i, sys, kFig3).mean_aoi;
    EXPECT_GT(exact_mean_age(12, 1, 4, 3, 0.34, i, true), thm);
    EXPECT_GT(exact_mean_age(12, 1, 4, 3, 0.34, i, false), thm);
  }
}

TEST(Simulator, EventsAndMomentsWithinFourSigma) {
  const SimConfig c = make(24, 1, 8, 6, kFig3, 100000, 77);
  const SimReport r = simulate(c);
  const SimComparison cmp = compare_with_analysis(c, r);
  EXPECT_LT(cmp.z_a, 4.0);
  EXPECT_LT(cmp.z_b, 4.0);
  EXPECT_LT(cmp.z_c, 4.0);
  for (const SourceComparison& s : cmp.sources) {
    EXPECT_LT(std::abs(s.empirical_x - s.predicted_x), 4 * s.se_x);
    EXPECT_LT(std::abs(s.empirical_x2 - s.predicted_x2), 4 * s.se_x2);
  }
}

TEST(Simulator, CorrelatedChannelDiscrepancyIsReported) {
  // With alpha + beta far from 1 the block-independence behind the event
  // probabilities fails; the comparison must still be produced.
  const SimConfig c = make(24, 1, 8, 6, {0.02, 0.05, 0.01, 0.8}, 20000, 6);
  const SimComparison cmp = compare_with_analysis(c, simulate(c));
  EXPECT_TRUE(std::isfinite(cmp.z_b));
  EXPECT_EQ(cmp.sources.size(), 6u);
}

}  // namespace
}  // namespace aoimds
