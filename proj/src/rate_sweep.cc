#include "aoimds/rate_sweep.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace aoimds {

SweepResult rate_sweep(int n, const GEParams& params, std::int64_t sources,
                       std::int64_t ell, int k_min, int k_max, int threads,
                       double region_tolerance) {
  params.validate();
  if (!(1 <= k_min && k_min <= k_max && k_max <= n)) {
    throw std::invalid_argument("sweep range must satisfy 1 <= k_min <= k_max <= n");
  }
  const double p = marginal_erasure_prob(params);
  const ErasureCountPmf others = erasure_pmf_dp(n - 1, params);
  const double c_eps = calibrate_c_eps(region_tolerance);
  const bool has_spread = p > 0.0 && p < 1.0;
  const AoiResult uncoded = uncoded_aoi(sources, ell, p, UncodedMode::kLargeK);

  SweepResult result;
  result.rows.resize(static_cast<std::size_t>(k_max - k_min + 1));

  std::atomic<int> next{0};
  const int count = static_cast<int>(result.rows.size());
  const auto worker = [&] {
    for (int i = next++; i < count; i = next++) {
      const int k = k_min + i;
      SweepRow& row = result.rows[static_cast<std::size_t>(i)];
      const SystemConfig cfg = SystemConfig::create(sources, ell, n, k);
      const EventProbabilities ev = event_probs(p, others, k);
      const AoiResult approx = coded_aoi_approx(cfg, ev).aoi;
      row.n = n;
      row.k = k;
      row.rate = static_cast<double>(k) / static_cast<double>(n);
      row.p_c = ev.p_c;
      row.aoi_approx = approx.mean_aoi;
      row.aoi_uncoded = uncoded.mean_aoi;
      row.finite = approx.finite && uncoded.finite;
      row.gain = row.finite ? uncoded.mean_aoi / approx.mean_aoi
                            : std::numeric_limits<double>::quiet_NaN();
      if (has_spread) {
        const double c = c_from_k(static_cast<double>(k), n, p);
        row.c_n = c;
        row.region = gaussian_params(c, n, p, c_eps).region;
        row.aoi_gaussian = gaussian_aoi(c, n, sources, ell, p).mean_aoi;
      }
    }
  };
  const int workers = std::clamp(threads, 1, count);
  std::vector<std::thread> pool;
  for (int t = 1; t < workers; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  SweepSummary& s = result.summary;
  const SweepRow* best = nullptr;
  for (const SweepRow& row : result.rows) {
    if (best == nullptr || row.aoi_approx <= best->aoi_approx) best = &row;
  }
  s.k_star = best->k;
  s.rate = best->rate;
  s.aoi_star = best->aoi_approx;
  s.aoi_uncoded = uncoded.mean_aoi;
  s.gain = best->gain;
  s.ceiling = 1.0 + p;
  s.c_eps = c_eps;
  s.finite = best->finite;
  return result;
}

}  // namespace aoimds
