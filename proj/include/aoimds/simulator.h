#ifndef AOIMDS_SIMULATOR_H_
#define AOIMDS_SIMULATOR_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "aoimds/aoi_analysis.h"
#include "aoimds/channel_model.h"

namespace aoimds {

// Age a recovered packet reports at the end of its block, for block
// position p = i mod k:
//   kPaper:     (n + 1 - p) * ell
//   kGeometric: (n - p) * ell   (time since the packet's own generation)
enum class RecoveryAgeOffset { kPaper, kGeometric };

struct SimConfig {
  SystemConfig system = SystemConfig::uncoded(1, 1);
  GEParams channel;
  bool coded = true;
  std::int64_t rounds = 0;
  // Unset means max(100, rounds / 10), reduced to rounds / 10 when that
  // would not leave any measured rounds.
  std::optional<std::int64_t> warmup_rounds;
  std::uint64_t seed = 0;
  // Empty means sources 0..min(k, K)-1, one per block position.
  std::vector<std::int64_t> tracked_sources;
  RecoveryAgeOffset recovery_age_offset = RecoveryAgeOffset::kPaper;
  // Keep every age reset of tracked sources (tests and debugging).
  bool record_trace = false;

  std::int64_t effective_warmup() const;
  std::vector<std::int64_t> effective_tracked() const;
  // Throws std::invalid_argument on inconsistent settings.
  void validate() const;
};

struct ResetEvent {
  std::int64_t time = 0;   // slot at which the age drops
  std::int64_t value = 0;  // age right after the drop

  friend bool operator==(const ResetEvent&, const ResetEvent&) = default;
};

// Age sample path of one tracked source over the measurement window.
struct AgeTrace {
  // Twice the integral of the instantaneous age; integer because every
  // reset time and value is an integer number of slots.
  std::int64_t twice_area = 0;
  std::int64_t elapsed = 0;
  std::vector<ResetEvent> resets;  // only filled when record_trace is set

  friend bool operator==(const AgeTrace&, const AgeTrace&) = default;
};

struct SourceStats {
  std::int64_t source = 0;
  int position = 0;
  std::int64_t deliveries = 0;    // inter-reception samples measured
  std::int64_t recoveries = 0;    // of which via block decoding
  double sum_x = 0.0;
  double sum_x2 = 0.0;
  double sum_x4 = 0.0;
  AgeTrace trace;

  double mean_aoi() const;
  double mean_x() const;
  double mean_x2() const;
  double se_x() const;
  double se_x2() const;

  friend bool operator==(const SourceStats&, const SourceStats&) = default;
};

struct EventTally {
  std::int64_t a = 0;
  std::int64_t b = 0;
  std::int64_t c = 0;
  // Per-block sums of squared counts; blocks are the independent unit for
  // standard errors.
  double block_a2 = 0.0;
  double block_b2 = 0.0;
  double block_c2 = 0.0;

  std::int64_t total() const { return a + b + c; }

  friend bool operator==(const EventTally&, const EventTally&) = default;
};

struct SimReport {
  std::vector<SourceStats> sources;
  EventTally events;
  int block_length = 1;
  std::vector<std::int64_t> erasure_histogram;  // over measured blocks
  std::int64_t blocks = 0;                      // measured blocks
  std::int64_t blocks_total = 0;                // including warm-up
  std::uint64_t seed = 0;
  bool no_delivery = false;

  double freq_a() const;
  double freq_b() const;
  double freq_c() const;
  // Standard errors of the three event frequencies from per-block counts.
  double se_a() const;
  double se_b() const;
  double se_c() const;

  friend bool operator==(const SimReport&, const SimReport&) = default;
};

// Round-robin transmission without coding: every packet is one channel use,
// success drops the age to ell, an erased packet is discarded.
SimReport simulate_uncoded(const SimConfig& cfg);

// Systematic (n,k) MDS coding over consecutive groups of k stream packets.
// A packet is delivered directly, recovered at block end when the block has
// at most n-k erasures, or lost.
SimReport simulate_coded(const SimConfig& cfg);

// Dispatches on cfg.coded.
SimReport simulate(const SimConfig& cfg);

// Runs replications with seeds seed, seed+1, ... on up to `threads` workers
// and merges them in ascending seed order.
SimReport simulate_replicated(const SimConfig& cfg, int replications,
                              int threads);

// Accumulates b into a (same configuration, different seed).
void merge_into(SimReport& a, const SimReport& b);

// Twice the sawtooth area implied by a reset sequence, using the closed-form
// trapezoid per inter-reset interval.
std::int64_t polygon_twice_area(const std::vector<ResetEvent>& resets);

struct ErasureHistogram {
  int n = 0;
  std::int64_t windows = 0;
  std::vector<std::int64_t> counts;

  double frequency(int e) const;
  double mean() const;
};

// Erasure counts over independent windows of n uses, each window started
// from a fresh stationary state.
ErasureHistogram estimate_erasure_pmf(int n, std::int64_t windows,
                                      const GEParams& params,
                                      std::uint64_t seed);

// Analytical predictions lined up with a report.
struct SourceComparison {
  std::int64_t source = 0;
  int position = 0;
  double empirical_aoi = 0.0;
  double predicted_aoi = 0.0;
  double relative_error = 0.0;
  double empirical_x = 0.0;
  double predicted_x = 0.0;
  double se_x = 0.0;
  double empirical_x2 = 0.0;
  double predicted_x2 = 0.0;
  double se_x2 = 0.0;
};

struct SimComparison {
  EventProbabilities predicted_events;
  std::vector<SourceComparison> sources;
  // |empirical - predicted| / standard error for each event frequency.
  double z_a = 0.0;
  double z_b = 0.0;
  double z_c = 0.0;
  double max_relative_error = 0.0;
};

SimComparison compare_with_analysis(const SimConfig& cfg,
                                    const SimReport& report);

}  // namespace aoimds

#endif  // AOIMDS_SIMULATOR_H_
