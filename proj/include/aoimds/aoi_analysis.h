#ifndef AOIMDS_AOI_ANALYSIS_H_
#define AOIMDS_AOI_ANALYSIS_H_

#include <cstdint>
#include <optional>

#include "aoimds/channel_model.h"
#include "aoimds/erasure_distribution.h"

namespace aoimds {

// K sources served round robin, packets of ell slots, (n,k) MDS blocks.
//
// The aggregator cuts the round-robin packet stream into consecutive blocks
// of k data packets. When k divides K each source keeps the fixed position
// i mod k; otherwise positions rotate from round to round and lambda = K/k
// is fractional.
class SystemConfig {
 public:
  // Throws std::invalid_argument unless K >= 1, ell >= 1, 1 <= k <= n.
  static SystemConfig create(std::int64_t sources, std::int64_t ell,
                             int n, int k);
  // Uncoded system: n = k = 1.
  static SystemConfig uncoded(std::int64_t sources, std::int64_t ell);

  std::int64_t sources() const { return sources_; }
  std::int64_t ell() const { return ell_; }
  int n() const { return n_; }
  int k() const { return k_; }
  double lambda() const;
  bool evenly_divided() const { return sources_ % k_ == 0; }
  // Round duration lambda*n*ell in slots, evaluated as K*n*ell/k.
  double round_slots() const;
  // i mod k.
  int position(std::int64_t source) const;

 private:
  SystemConfig(std::int64_t sources, std::int64_t ell, int n, int k)
      : sources_(sources), ell_(ell), n_(n), k_(k) {}

  std::int64_t sources_;
  std::int64_t ell_;
  int n_;
  int k_;
};

struct AoiComponents {
  double main = 0.0;      // E[X]-driven sawtooth term
  double position = 0.0;  // recovery position term (coded only)
  double ell = 0.0;       // transmission-time offset
};

// Mean age in slots. Divergent systems (success probability zero) are
// reported with finite == false and mean_aoi == +inf instead of throwing.
struct AoiResult {
  double mean_aoi = 0.0;
  bool finite = true;
  std::optional<AoiComponents> components;

  static AoiResult divergent();
};

enum class UncodedMode { kExact, kLargeK };

// Kl(1+p)/(2(1-p)) (+ l in exact mode).
AoiResult uncoded_aoi(std::int64_t sources, std::int64_t ell, double p,
                      UncodedMode mode);

// One atom of the geometric inter-reception law of the uncoded system:
// P(X = x*K*ell) = (1-p) p^(x-1).
struct InterarrivalAtom {
  double slots = 0.0;
  double probability = 0.0;
};
InterarrivalAtom uncoded_interarrival_pmf(std::int64_t x, double p,
                                          std::int64_t sources,
                                          std::int64_t ell);

// Per data packet: A direct delivery, B erased but block decodable,
// C erased and lost.
struct EventProbabilities {
  double p_a = 0.0;
  double p_b = 0.0;
  double p_c = 0.0;
};

EventProbabilities event_probs(const SystemConfig& cfg, const GEParams& params);
// Same, given the marginal erasure probability and the pmf of the other
// n - 1 packets of the block.
EventProbabilities event_probs(double p, const ErasureCountPmf& others, int k);

struct InterarrivalMoments {
  double mean = 0.0;
  double second_moment = 0.0;
  bool finite = true;
};

// First two moments of the inter-reception time of source i.
InterarrivalMoments coded_interarrival_moments(const SystemConfig& cfg,
                                               const EventProbabilities& ev,
                                               std::int64_t source);

// Mean age of source i in the coded system:
//   lnl(1+pc)/(2(1-pc)) + pa pb ((n - i mod k) l)^2 / (lnl (1-pc)) + l
AoiResult coded_aoi_exact(std::int64_t source, const SystemConfig& cfg,
                          const GEParams& params);
AoiResult coded_aoi_exact(std::int64_t source, const SystemConfig& cfg,
                          const EventProbabilities& ev);

struct ApproxAoi {
  AoiResult aoi;
  // Largest of the two lower bounds on K under which the generic-source
  // approximation applies (position term evaluated at i mod k = 0).
  double large_k_bound = 0.0;
  // K >= kLargeKFactor * large_k_bound.
  bool large_k_valid = false;
};
inline constexpr double kLargeKFactor = 10.0;

// Generic-source large-K approximation Kn l (1+pc) / (2k(1-pc)). lambda is
// treated as real, so k need not divide K.
ApproxAoi coded_aoi_approx(const SystemConfig& cfg, const GEParams& params);
ApproxAoi coded_aoi_approx(const SystemConfig& cfg, const EventProbabilities& ev);

// Standard normal CDF via erfc; absolute error below 1e-10.
double normal_cdf(double x);

enum class Region { kRegion1 = 1, kRegion2 = 2, kRegion3 = 3 };

struct GaussianApprox {
  double c_n = 0.0;
  double k_bar = 0.0;
  double c_eps = 0.0;
  Region region = Region::kRegion3;
};

// k_bar = n - nP + c sqrt(nP(1-P)) and its inverse. c_from_k throws
// std::domain_error when P is 0 or 1 (the spread vanishes).
double k_bar_from_c(double c_n, int n, double p);
double c_from_k(double k_bar, int n, double p);
GaussianApprox gaussian_params(double c_n, int n, double p, double c_eps);

// Gaussian (CLT) approximation of the generic-source age for block size
// k_bar(c_n). Throws std::domain_error if k_bar/n falls outside (0, 1].
AoiResult gaussian_aoi(double c_n, int n, std::int64_t sources,
                       std::int64_t ell, double p);

struct RegionAoi {
  AoiResult aoi;
  Region region = Region::kRegion3;
};

// Piecewise simplification of gaussian_aoi:
//   c < -c_eps  : Phi ~ 0
//   c >  c_eps  : Phi ~ 1
//   otherwise   : Phi ~ (c + c_eps) / (2 c_eps), rate factor ~ 1 - P
RegionAoi region_aoi(double c_n, int n, std::int64_t sources,
                     std::int64_t ell, double p, double c_eps);

inline constexpr double kDefaultRegionTolerance = 1e-3;

// Smallest c > 0 with exp(-c^2)/c <= eps, by bisection to 1e-9.
double calibrate_c_eps(double eps = kDefaultRegionTolerance);

struct OptimalK {
  int k_star = 0;
  AoiResult aoi;
};

// argmin over k in [1, n] of the large-K approximation; ties go to the larger
// k.
OptimalK optimal_k(int n, const GEParams& params, std::int64_t sources,
                   std::int64_t ell);

struct CodingGain {
  double gain = 1.0;     // uncoded / optimal coded (large-K forms)
  double ceiling = 1.0;  // 1 + P
  int k_star = 0;
  AoiResult coded;
  AoiResult uncoded;
};

CodingGain coding_gain(int n, const GEParams& params, std::int64_t sources,
                       std::int64_t ell);

}  // namespace aoimds

#endif  // AOIMDS_AOI_ANALYSIS_H_
