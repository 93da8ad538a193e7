#include "aoimds/erasure_distribution.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace aoimds {

namespace {

// The closed form sums signed powers of alpha + beta - 1 that cancel heavily
// when alpha + beta < 1, so it runs in quad precision where available.
#if defined(__SIZEOF_FLOAT128__) && !defined(AOIMDS_NO_FLOAT128)
using Real = __float128;
#else
using Real = long double;
#endif

long double binomial_ld(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0.0L;
  k = std::min(k, n - k);
  long double c = 1.0L;
  for (int i = 1; i <= k; ++i) {
    c = c * static_cast<long double>(n - k + i) / static_cast<long double>(i);
  }
  return std::round(c);
}

// Exact in Real for the window lengths the closed form accepts.
Real binomial_real(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  Real c = 1;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

// x^j with 0^0 = 1.
Real ipow(Real x, int j) {
  Real result = 1;
  for (int i = 0; i < j; ++i) result *= x;
  return result;
}

Real m_coeff_real(int n, int r, const GEParams& p) {
  if (n < 0 || r < 0 || r > n) return 0;
  const Real alpha = p.alpha;
  const Real beta = p.beta;
  const Real signed_term = alpha - (1 - beta);
  const Real beta_bar = 1 - beta;
  const Real alpha_bar = 1 - alpha;
  Real sum = 0;
  for (int a = std::max(r, n - r); a <= n; ++a) {
    sum += binomial_real(a, r) * binomial_real(r, n - a) *
           ipow(signed_term, n - a) * ipow(beta_bar, a - n + r) *
           ipow(alpha_bar, a - r);
  }
  return sum;
}

struct BadTerms {
  Real g_b, b_b, m0, m1, m2;
};

BadTerms bad_terms(int n, int r, const GEParams& p) {
  const Real alpha = p.alpha;
  const Real beta = p.beta;
  const Real pi_g = beta / (alpha + beta);
  const Real pi_b = 1 - pi_g;
  const Real m0 = m_coeff_real(n, r, p);
  const Real m1 = m_coeff_real(n - 1, r, p);
  const Real m2 = m_coeff_real(n - 1, r - 1, p);
  const Real g_b =
      pi_g * m0 + beta * pi_b * m1 - (1 - beta) * pi_g * m2;
  const Real b_b =
      pi_b * m0 - (1 - alpha) * pi_b * m1 + alpha * pi_g * m2;
  return {g_b, b_b, m0, m1, m2};
}

}  // namespace

double ErasureCountPmf::sum() const {
  double s = 0.0;
  for (double v : probs) s += v;
  return s;
}

double ErasureCountPmf::mean() const {
  double s = 0.0;
  for (std::size_t e = 0; e < probs.size(); ++e) s += static_cast<double>(e) * probs[e];
  return s;
}

double ErasureCountPmf::upper_tail(int threshold) const {
  if (threshold < 0) return 1.0;
  double s = 0.0;
  for (int e = n; e > threshold; --e) s += probs[static_cast<std::size_t>(e)];
  return std::clamp(s, 0.0, 1.0);
}

double binomial(int n, int k) { return static_cast<double>(binomial_ld(n, k)); }

double m_coeff(int n, int r, const GEParams& params) {
  return static_cast<double>(m_coeff_real(n, r, params));
}

BadStateCountTerms bad_count_probs(int n, int r, const GEParams& params) {
  if (n < 1 || r < 0 || r > n) {
    throw std::out_of_range("bad_count_probs requires 0 <= r <= n and n >= 1");
  }
  params.validate();
  const BadTerms t = bad_terms(n, r, params);
  return {n,
          r,
          static_cast<double>(t.g_b),
          static_cast<double>(t.b_b),
          static_cast<double>(t.m0),
          static_cast<double>(t.m1),
          static_cast<double>(t.m2)};
}

ErasureCountPmf erasure_pmf_closed(int n, const GEParams& params, int max_n) {
  params.validate();
  if (n < 1 || n > max_n) {
    throw std::out_of_range("closed-form pmf supports 1 <= n <= " +
                            std::to_string(max_n) + ", got n = " +
                            std::to_string(n));
  }
  // Relabelling leaves alpha + beta unchanged, so the sign of
  // alpha - (1 - beta) survives it; the polynomial identity still holds.
  const GEParams p =
      params.alpha < 1.0 - params.beta ? reverse_states(params) : params;

  std::vector<Real> bad_count(static_cast<std::size_t>(n) + 1);
  for (int r = 0; r <= n; ++r) {
    const BadTerms t = bad_terms(n, r, p);
    bad_count[static_cast<std::size_t>(r)] = t.g_b + t.b_b;
  }

  const Real e0 = p.eps0, e1 = p.eps1;
  std::vector<Real> acc(static_cast<std::size_t>(n) + 1, Real(0));
  for (int r = 0; r <= n; ++r) {
    const Real w = bad_count[static_cast<std::size_t>(r)];
    for (int e = 0; e <= n; ++e) {
      // b = erasures that fall on bad-state instances.
      for (int b = std::max(0, e + r - n); b <= std::min(r, e); ++b) {
        acc[static_cast<std::size_t>(e)] +=
            binomial_real(r, b) * binomial_real(n - r, e - b) *
            ipow(1 - e0, n + b - e - r) * ipow(e0, e - b) *
            ipow(1 - e1, r - b) * ipow(e1, b) * w;
      }
    }
  }

  ErasureCountPmf pmf;
  pmf.n = n;
  pmf.method = PmfMethod::kClosedForm;
  pmf.probs.reserve(acc.size());
  for (Real v : acc) pmf.probs.push_back(static_cast<double>(v));
  return pmf;
}

ErasureCountPmf erasure_pmf_dp(int n, const GEParams& params) {
  params.validate();
  if (n < 0) throw std::out_of_range("window length must be non-negative");
  const double pi_g = steady_state_good(params);
  const std::array<double, 2> eps{params.eps0, params.eps1};
  // stay[s]: probability of remaining in state s.
  const std::array<double, 2> stay{1.0 - params.alpha, 1.0 - params.beta};

  // f[s][e]: P(e erasures so far, state of the next use = s).
  const std::size_t width = static_cast<std::size_t>(n) + 1;
  std::array<std::vector<double>, 2> f{std::vector<double>(width, 0.0),
                                       std::vector<double>(width, 0.0)};
  std::array<std::vector<double>, 2> g = f;
  f[0][0] = pi_g;
  f[1][0] = 1.0 - pi_g;

  for (int t = 0; t < n; ++t) {
    std::fill(g[0].begin(), g[0].end(), 0.0);
    std::fill(g[1].begin(), g[1].end(), 0.0);
    for (int e = 0; e <= t; ++e) {
      const auto ue = static_cast<std::size_t>(e);
      for (int s = 0; s < 2; ++s) {
        const double mass = f[s][ue];
        if (mass == 0.0) continue;
        const double kept = mass * (1.0 - eps[s]);
        const double lost = mass * eps[s];
        const double st = stay[s];
        g[s][ue] += kept * st;
        g[1 - s][ue] += kept * (1.0 - st);
        g[s][ue + 1] += lost * st;
        g[1 - s][ue + 1] += lost * (1.0 - st);
      }
    }
    std::swap(f, g);
  }

  ErasureCountPmf pmf;
  pmf.n = n;
  pmf.method = PmfMethod::kDynamicProgram;
  pmf.probs.resize(width);
  for (std::size_t e = 0; e < width; ++e) pmf.probs[e] = f[0][e] + f[1][e];
  return pmf;
}

double bep_mds(const ErasureCountPmf& pmf, int k) {
  if (k < 1) throw std::out_of_range("k must be at least 1");
  return pmf.upper_tail(pmf.n - k);
}

double bep_mds(int n, int k, const GEParams& params) {
  if (n < 0) throw std::out_of_range("n must be non-negative");
  if (k < 1) throw std::out_of_range("k must be at least 1");
  if (k > n) return 1.0;
  return bep_mds(erasure_pmf_dp(n, params), k);
}

}  // namespace aoimds
