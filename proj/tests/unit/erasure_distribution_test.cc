#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "aoimds/erasure_distribution.h"
#include "aoimds/simulator.h"

namespace aoimds {
namespace {

const GEParams kFig3{0.2, 0.8, 0.2, 0.9};

// Oracle: enumerate all 2^n state paths from the stationary law and convolve
// the per-use erasure Bernoullis along each path.
std::vector<double> brute_force_pmf(int n, const GEParams& p) {
  std::vector<double> pmf(n + 1, 0.0);
  const double pi_g = p.beta / (p.alpha + p.beta);
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    double w = (mask & 1u) ? 1.0 - pi_g : pi_g;
    for (int t = 1; t < n; ++t) {
      const bool prev = (mask >> (t - 1)) & 1u;
      const bool cur = (mask >> t) & 1u;
      if (!prev) w *= cur ? p.alpha : 1.0 - p.alpha;
      else w *= cur ? 1.0 - p.beta : p.beta;
    }
    std::vector<double> conv(n + 1, 0.0);
    conv[0] = 1.0;
    for (int t = 0; t < n; ++t) {
      const double eps = ((mask >> t) & 1u) ? p.eps1 : p.eps0;
      for (int e = t + 1; e >= 0; --e) {
        conv[e] = conv[e] * (1 - eps) + (e > 0 ? conv[e - 1] * eps : 0.0);
      }
    }
    for (int e = 0; e <= n; ++e) pmf[e] += w * conv[e];
  }
  return pmf;
}

double binomial_pmf(int n, int e, double p) {
  double c = 1.0;
  for (int i = 1; i <= e; ++i) c = c * (n - e + i) / i;
  return c * std::pow(p, e) * std::pow(1 - p, n - e);
}

std::vector<GEParams> grid() {
  std::vector<GEParams> out = {kFig3,
                               {0.05, 0.1, 0.01, 0.8},   // alpha < 1 - beta
                               {0.9, 0.7, 0.3, 0.6},     // alpha > 1 - beta
                               {0.0, 1.0, 0.1, 0.9},     // absorbing Good
                               {1.0, 0.0, 0.1, 0.9},     // absorbing Bad
                               {0.5, 0.5, 0.0, 1.0}};
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 14; ++i) out.push_back({u(rng), u(rng), u(rng), u(rng)});
  return out;
}

TEST(MCoeff, HandExpansions) {
  EXPECT_DOUBLE_EQ(m_coeff(0, 0, kFig3), 1.0);
  EXPECT_NEAR(m_coeff(1, 0, kFig3), 0.8, 1e-15);
  EXPECT_NEAR(m_coeff(1, 1, kFig3), 0.2, 1e-15);
  EXPECT_EQ(m_coeff(3, -1, kFig3), 0.0);
  EXPECT_EQ(m_coeff(3, 4, kFig3), 0.0);
}

TEST(BadCountProbs, HandValuesAndNormalization) {
  const auto t0 = bad_count_probs(1, 0, kFig3);
  EXPECT_NEAR(t0.g_b, 0.8, 1e-15);
  EXPECT_NEAR(t0.b_b, 0.0, 1e-15);
  const auto t1 = bad_count_probs(1, 1, kFig3);
  EXPECT_NEAR(t1.g_b, 0.0, 1e-15);
  EXPECT_NEAR(t1.b_b, 0.2, 1e-15);
  for (const GEParams& p : grid()) {
    for (int n : {1, 4, 12}) {
      double total = 0.0;
      for (int r = 0; r <= n; ++r) {
        const auto t = bad_count_probs(n, r, p);
        EXPECT_GE(t.g_b + t.b_b, -1e-12);
        EXPECT_LE(t.g_b + t.b_b, 1 + 1e-12);
        total += t.g_b + t.b_b;
      }
      EXPECT_NEAR(total, 1.0, 1e-12);
    }
  }
  EXPECT_THROW(bad_count_probs(0, 0, kFig3), std::out_of_range);
  EXPECT_THROW(bad_count_probs(3, 4, kFig3), std::out_of_range);
}

TEST(ErasurePmf, SmallWindowsOnFig3Channel) {
  for (const auto& pmf : {erasure_pmf_closed(1, kFig3), erasure_pmf_dp(1, kFig3)}) {
    EXPECT_NEAR(pmf.probs[0], 0.66, 1e-12);
    EXPECT_NEAR(pmf.probs[1], 0.34, 1e-12);
  }
  const double want[] = {0.4356, 0.4488, 0.1156};
  for (const auto& pmf : {erasure_pmf_closed(2, kFig3), erasure_pmf_dp(2, kFig3)}) {
    for (int e = 0; e <= 2; ++e) EXPECT_NEAR(pmf.probs[e], want[e], 1e-12);
  }
}

TEST(ErasurePmf, BothMethodsMatchPathEnumeration) {
  for (const GEParams& p : grid()) {
    for (int n = 1; n <= 10; ++n) {
      const auto oracle = brute_force_pmf(n, p);
      const auto dp = erasure_pmf_dp(n, p);
      const auto closed = erasure_pmf_closed(n, p);
      EXPECT_EQ(dp.method, PmfMethod::kDynamicProgram);
      EXPECT_EQ(closed.method, PmfMethod::kClosedForm);
      for (int e = 0; e <= n; ++e) {
        EXPECT_NEAR(dp.probs[e], oracle[e], 1e-13) << "n=" << n << " e=" << e;
        EXPECT_NEAR(closed.probs[e], oracle[e], 1e-12) << "n=" << n << " e=" << e;
      }
    }
  }
}

TEST(ErasurePmf, ClosedAndDpAgreeUpToThirty) {
  for (const GEParams& p : grid()) {
    for (int n = 11; n <= 30; ++n) {
      const auto dp = erasure_pmf_dp(n, p);
      const auto closed = erasure_pmf_closed(n, p);
      for (int e = 0; e <= n; ++e) ASSERT_NEAR(closed.probs[e], dp.probs[e], 1e-8);
    }
  }
}

TEST(ErasurePmf, EqualErasureProbsGiveBinomial) {
  for (double eps : {0.0, 0.1, 0.34, 0.9, 1.0}) {
    const GEParams p{0.07, 0.15, eps, eps};
    for (int n : {1, 3, 8, 30}) {
      const auto dp = erasure_pmf_dp(n, p);
      const auto closed = erasure_pmf_closed(n, p);
      for (int e = 0; e <= n; ++e) {
        EXPECT_NEAR(dp.probs[e], binomial_pmf(n, e, eps), 1e-12);
        EXPECT_NEAR(closed.probs[e], binomial_pmf(n, e, eps), 1e-12);
      }
    }
  }
}

TEST(ErasurePmf, DpNormalizationAndMean) {
  for (const GEParams& p : grid()) {
    for (int n : {1, 7, 50, 150, 300}) {
      const auto dp = erasure_pmf_dp(n, p);
      EXPECT_NEAR(dp.sum(), 1.0, 1e-9);
      EXPECT_NEAR(dp.mean(), n * marginal_erasure_prob(p), 1e-8);
      for (double v : dp.probs) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
      }
    }
  }
  const auto empty = erasure_pmf_dp(0, kFig3);
  ASSERT_EQ(empty.probs.size(), 1u);
  EXPECT_EQ(empty.probs[0], 1.0);
}

TEST(ErasurePmf, ClosedFormWindowCap) {
  EXPECT_THROW(erasure_pmf_closed(31, kFig3), std::out_of_range);
  EXPECT_THROW(erasure_pmf_closed(0, kFig3), std::out_of_range);
  EXPECT_NO_THROW(erasure_pmf_closed(31, kFig3, 40));
}

TEST(Bep, Examples) {
  EXPECT_NEAR(bep_mds(2, 1, kFig3), 0.1156, 1e-12);
  for (const GEParams& p : grid()) {
    for (int n : {1, 5, 20}) {
      EXPECT_NEAR(bep_mds(n, n, p), 1.0 - erasure_pmf_dp(n, p).probs[0], 1e-12);
      EXPECT_EQ(bep_mds(n - 1, n, p), 1.0);
    }
  }
}

TEST(Bep, Monotonicity) {
  for (const GEParams& p : grid()) {
    for (int n = 1; n <= 40; n += 3) {
      for (int k = 1; k < n; ++k) {
        EXPECT_LE(bep_mds(n, k, p), bep_mds(n, k + 1, p) + 1e-15);
      }
    }
    for (int k = 1; k <= 10; ++k) {
      for (int n = k; n < 40; ++n) {
        EXPECT_GE(bep_mds(n, k, p) + 1e-15, bep_mds(n + 1, k, p));
      }
    }
  }
}

TEST(ErasureHistogram, MatchesDpWithinFourSigma) {
  const std::int64_t windows = 100000;
  for (const GEParams& p : {kFig3, GEParams{0.05, 0.2, 0.02, 0.7}}) {
    const int n = 6;
    const auto h = estimate_erasure_pmf(n, windows, p, 31);
    const auto dp = erasure_pmf_dp(n, p);
    for (int e = 0; e <= n; ++e) {
      const double q = dp.probs[e];
      const double se = std::sqrt(q * (1 - q) / windows);
      EXPECT_LE(std::abs(h.frequency(e) - q), 4 * se + 1e-12) << "e=" << e;
    }
    const double pe = marginal_erasure_prob(p);
    double var = 0.0;
    for (int e = 0; e <= n; ++e) var += dp.probs[e] * (e - n * pe) * (e - n * pe);
    EXPECT_LE(std::abs(h.mean() - n * pe), 4 * std::sqrt(var / windows));
  }
  const auto clean = estimate_erasure_pmf(5, 1000, {0.3, 0.3, 0.0, 0.0}, 1);
  EXPECT_EQ(clean.counts[0], 1000);
}

}  // namespace
}  // namespace aoimds
