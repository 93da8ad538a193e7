#ifndef AOIMDS_ERASURE_DISTRIBUTION_H_
#define AOIMDS_ERASURE_DISTRIBUTION_H_

#include <vector>

#include "aoimds/channel_model.h"

namespace aoimds {

enum class PmfMethod { kClosedForm, kDynamicProgram };

// Distribution of the number of erasures in n consecutive uses of a GE
// channel started from its stationary law. probs[e] = P(n, e), e = 0..n.
struct ErasureCountPmf {
  int n = 0;
  std::vector<double> probs;
  PmfMethod method = PmfMethod::kDynamicProgram;

  double sum() const;
  double mean() const;
  // P(count > threshold). Summed from the upper tail; threshold < 0 gives 1.
  double upper_tail(int threshold) const;
};

// Default upper window length for the combinatorial closed form. Beyond this
// the signed (alpha - (1 - beta))^j terms lose too many digits to cancellation.
inline constexpr int kDefaultClosedFormMaxN = 30;

// Probabilities of r bad-state instances in an n-use window, split by the
// state of the final instance.
struct BadStateCountTerms {
  int n = 0;
  int r = 0;
  double g_b = 0.0;  // ends Good
  double b_b = 0.0;  // ends Bad
  double m_n_r = 0.0;
  double m_nm1_r = 0.0;
  double m_nm1_rm1 = 0.0;
};

// Binomial coefficient as a double; 0 when k < 0 or k > n.
double binomial(int n, int k);

// m(n, r) = sum_{a=max(r,n-r)}^{n} C(a,r) C(r,n-a) (alpha-(1-beta))^{n-a}
//           (1-beta)^{a-n+r} (1-alpha)^{a-r}
// with 0^0 = 1 and m = 0 outside 0 <= r <= n. The sum is a polynomial
// identity in (alpha, beta); it stays valid when alpha < 1 - beta although
// individual terms then alternate in sign.
double m_coeff(int n, int r, const GEParams& params);

// (g_B, b_B) for r bad instances out of n >= 1 with stationary start.
BadStateCountTerms bad_count_probs(int n, int r, const GEParams& params);

// Closed-form erasure-count pmf built from m(n,r) and the per-state binomial
// split. When alpha < 1 - beta the states are relabelled first. Throws
// std::out_of_range when n is outside [1, max_n].
ErasureCountPmf erasure_pmf_closed(int n, const GEParams& params,
                                   int max_n = kDefaultClosedFormMaxN);

// O(n^2) forward recursion over (erasure count, current state). n = 0 yields
// the point mass at 0. This is the production engine.
ErasureCountPmf erasure_pmf_dp(int n, const GEParams& params);

// Block error probability of an (n,k) MDS code: 1 - sum_{e<=n-k} P(n,e).
// k > n gives 1 (empty sum). n may be 0.
double bep_mds(int n, int k, const GEParams& params);

// Same, reusing a pmf already computed for window length n.
double bep_mds(const ErasureCountPmf& pmf, int k);

}  // namespace aoimds

#endif  // AOIMDS_ERASURE_DISTRIBUTION_H_
