#ifndef AOIMDS_RATE_SWEEP_H_
#define AOIMDS_RATE_SWEEP_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "aoimds/aoi_analysis.h"

namespace aoimds {

struct SweepRow {
  int n = 0;
  int k = 0;
  double rate = 0.0;  // k / n
  double p_c = 0.0;
  double aoi_approx = 0.0;
  // Unset when P is 0 or 1 (no spread, c_n undefined).
  std::optional<double> aoi_gaussian;
  double aoi_uncoded = 0.0;  // large-K uncoded level
  double gain = 0.0;         // aoi_uncoded / aoi_approx
  std::optional<double> c_n;
  std::optional<Region> region;
  bool finite = true;
};

struct SweepSummary {
  int k_star = 0;
  double rate = 0.0;
  double aoi_star = 0.0;
  double aoi_uncoded = 0.0;
  double gain = 0.0;
  double ceiling = 0.0;  // 1 + P
  double c_eps = 0.0;
  bool finite = true;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // ascending k
  SweepSummary summary;
};

// One row per k in [k_min, k_max]. Rows are computed on up to `threads`
// workers and returned in ascending k. Throws std::invalid_argument unless
// 1 <= k_min <= k_max <= n.
SweepResult rate_sweep(int n, const GEParams& params, std::int64_t sources,
                       std::int64_t ell, int k_min, int k_max, int threads,
                       double region_tolerance = kDefaultRegionTolerance);

}  // namespace aoimds

#endif  // AOIMDS_RATE_SWEEP_H_
