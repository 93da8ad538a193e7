#include "aoimds/simulator.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace aoimds {

namespace {

double safe_sqrt(double v) { return v > 0.0 ? std::sqrt(v) : 0.0; }

// Mutable per-source state while the stream is being simulated.
struct Tracker {
  bool has_prev = false;
  std::int64_t prev_time = 0;
  std::int64_t prev_age = 0;
};

SimReport run_blocks(const SimConfig& cfg, int n, int k) {
  cfg.validate();
  const std::int64_t sources = cfg.system.sources();
  const std::int64_t ell = cfg.system.ell();
  const std::int64_t warm_index = cfg.effective_warmup() * sources;
  const std::int64_t total_data = cfg.rounds * sources;
  const std::int64_t num_blocks = (total_data + k - 1) / k;
  const bool fixed_positions = sources % k == 0;

  SimReport report;
  report.block_length = n;
  report.erasure_histogram.assign(static_cast<std::size_t>(n) + 1, 0);
  report.blocks_total = num_blocks;
  report.seed = cfg.seed;

  const std::vector<std::int64_t> tracked = cfg.effective_tracked();
  std::vector<int> slot_of(static_cast<std::size_t>(sources), -1);
  report.sources.resize(tracked.size());
  for (std::size_t s = 0; s < tracked.size(); ++s) {
    slot_of[static_cast<std::size_t>(tracked[s])] = static_cast<int>(s);
    report.sources[s].source = tracked[s];
    report.sources[s].position =
        fixed_positions ? static_cast<int>(tracked[s] % k) : -1;
  }
  std::vector<Tracker> trackers(tracked.size());

  GilbertElliottChannel channel(cfg.channel, cfg.seed);
  std::vector<char> erased(static_cast<std::size_t>(n));
  const std::int64_t paper_extra =
      cfg.recovery_age_offset == RecoveryAgeOffset::kPaper ? 1 : 0;

  std::int64_t block_start = 0;
  for (std::int64_t block = 0; block < num_blocks; ++block) {
    int erasures = 0;
    for (int j = 0; j < n; ++j) {
      erased[static_cast<std::size_t>(j)] = channel.transmit() ? 1 : 0;
      erasures += erased[static_cast<std::size_t>(j)];
    }
    const bool decodable = erasures <= n - k;
    const std::int64_t first_data = block * k;
    const bool measured = first_data >= warm_index;
    std::int64_t count_a = 0, count_b = 0, count_c = 0;

    for (int j = 0; j < k; ++j) {
      const std::int64_t data_index = first_data + j;
      const std::int64_t src = data_index % sources;
      std::int64_t recv_time = 0, age = 0;
      bool delivered = true, recovered = false;
      if (!erased[static_cast<std::size_t>(j)]) {
        ++count_a;
        recv_time = block_start + (j + 1) * ell;
        age = ell;
      } else if (decodable) {
        ++count_b;
        recovered = true;
        recv_time = block_start + n * ell;
        age = (n - j + paper_extra) * ell;
      } else {
        ++count_c;
        delivered = false;
      }

      const int slot = slot_of[static_cast<std::size_t>(src)];
      if (!delivered || slot < 0) continue;
      Tracker& tr = trackers[static_cast<std::size_t>(slot)];
      SourceStats& st = report.sources[static_cast<std::size_t>(slot)];
      if (tr.has_prev && data_index >= warm_index) {
        const std::int64_t x = recv_time - tr.prev_time;
        // Age climbs from prev_age to prev_age + x over the interval.
        st.trace.twice_area += 2 * tr.prev_age * x + x * x;
        st.trace.elapsed += x;
        const double xd = static_cast<double>(x);
        st.sum_x += xd;
        st.sum_x2 += xd * xd;
        st.sum_x4 += xd * xd * xd * xd;
        ++st.deliveries;
        if (recovered) ++st.recoveries;
        if (cfg.record_trace) {
          if (st.trace.resets.empty()) {
            st.trace.resets.push_back({tr.prev_time, tr.prev_age});
          }
          st.trace.resets.push_back({recv_time, age});
        }
      }
      tr.has_prev = true;
      tr.prev_time = recv_time;
      tr.prev_age = age;
    }

    if (measured) {
      ++report.blocks;
      ++report.erasure_histogram[static_cast<std::size_t>(erasures)];
      EventTally& ev = report.events;
      ev.a += count_a;
      ev.b += count_b;
      ev.c += count_c;
      ev.block_a2 += static_cast<double>(count_a * count_a);
      ev.block_b2 += static_cast<double>(count_b * count_b);
      ev.block_c2 += static_cast<double>(count_c * count_c);
    }
    block_start += n * ell;
  }

  for (const SourceStats& st : report.sources) {
    if (st.deliveries == 0) report.no_delivery = true;
  }
  return report;
}

double block_se(double sum, double sum_sq, std::int64_t blocks,
                std::int64_t total) {
  if (blocks < 2 || total == 0) return 0.0;
  const double nb = static_cast<double>(blocks);
  const double mean = sum / nb;
  const double var = (sum_sq / nb - mean * mean) * nb / (nb - 1.0);
  // Frequency = sum / total, with total / blocks packets per block.
  return safe_sqrt(var / nb) * nb / static_cast<double>(total);
}

double z_score(double empirical, double predicted, double se) {
  const double diff = std::abs(empirical - predicted);
  if (se > 0.0) return diff / se;
  return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

}  // namespace

std::int64_t SimConfig::effective_warmup() const {
  if (warmup_rounds) return *warmup_rounds;
  const std::int64_t preferred = std::max<std::int64_t>(100, rounds / 10);
  return preferred < rounds ? preferred : rounds / 10;
}

std::vector<std::int64_t> SimConfig::effective_tracked() const {
  if (!tracked_sources.empty()) return tracked_sources;
  const int k = coded ? system.k() : 1;
  const std::int64_t count = std::min<std::int64_t>(k, system.sources());
  std::vector<std::int64_t> out;
  for (std::int64_t i = 0; i < count; ++i) out.push_back(i);
  return out;
}

void SimConfig::validate() const {
  channel.validate();
  if (rounds < 1) throw std::invalid_argument("rounds must be positive");
  const std::int64_t warm = effective_warmup();
  if (warm < 0 || warm >= rounds) {
    throw std::invalid_argument("warmup_rounds must satisfy 0 <= warmup < rounds");
  }
  if (coded && system.sources() < system.k()) {
    throw std::invalid_argument(
        "coded simulation needs K >= k so a block holds each source at most once");
  }
  std::vector<std::int64_t> seen;
  for (std::int64_t s : tracked_sources) {
    if (s < 0 || s >= system.sources()) {
      throw std::invalid_argument("tracked source index out of range [0, K)");
    }
    if (std::find(seen.begin(), seen.end(), s) != seen.end()) {
      throw std::invalid_argument("tracked sources must be distinct");
    }
    seen.push_back(s);
  }
}

double SourceStats::mean_aoi() const {
  if (trace.elapsed == 0) return std::numeric_limits<double>::infinity();
  return static_cast<double>(trace.twice_area) /
         (2.0 * static_cast<double>(trace.elapsed));
}

double SourceStats::mean_x() const {
  return deliveries ? sum_x / static_cast<double>(deliveries)
                    : std::numeric_limits<double>::infinity();
}

double SourceStats::mean_x2() const {
  return deliveries ? sum_x2 / static_cast<double>(deliveries)
                    : std::numeric_limits<double>::infinity();
}

double SourceStats::se_x() const {
  if (deliveries < 2) return 0.0;
  const double m = mean_x();
  return safe_sqrt((mean_x2() - m * m) / static_cast<double>(deliveries - 1));
}

double SourceStats::se_x2() const {
  if (deliveries < 2) return 0.0;
  const double m2 = mean_x2();
  const double m4 = sum_x4 / static_cast<double>(deliveries);
  return safe_sqrt((m4 - m2 * m2) / static_cast<double>(deliveries - 1));
}

double SimReport::freq_a() const {
  return events.total() ? static_cast<double>(events.a) / static_cast<double>(events.total()) : 0.0;
}
double SimReport::freq_b() const {
  return events.total() ? static_cast<double>(events.b) / static_cast<double>(events.total()) : 0.0;
}
double SimReport::freq_c() const {
  return events.total() ? static_cast<double>(events.c) / static_cast<double>(events.total()) : 0.0;
}
double SimReport::se_a() const {
  return block_se(static_cast<double>(events.a), events.block_a2, blocks, events.total());
}
double SimReport::se_b() const {
  return block_se(static_cast<double>(events.b), events.block_b2, blocks, events.total());
}
double SimReport::se_c() const {
  return block_se(static_cast<double>(events.c), events.block_c2, blocks, events.total());
}

SimReport simulate_uncoded(const SimConfig& cfg) { return run_blocks(cfg, 1, 1); }

SimReport simulate_coded(const SimConfig& cfg) {
  return run_blocks(cfg, cfg.system.n(), cfg.system.k());
}

SimReport simulate(const SimConfig& cfg) {
  return cfg.coded ? simulate_coded(cfg) : simulate_uncoded(cfg);
}

void merge_into(SimReport& a, const SimReport& b) {
  if (a.sources.size() != b.sources.size() ||
      a.erasure_histogram.size() != b.erasure_histogram.size()) {
    throw std::invalid_argument("cannot merge reports of different shapes");
  }
  for (std::size_t i = 0; i < a.sources.size(); ++i) {
    SourceStats& x = a.sources[i];
    const SourceStats& y = b.sources[i];
    x.deliveries += y.deliveries;
    x.recoveries += y.recoveries;
    x.sum_x += y.sum_x;
    x.sum_x2 += y.sum_x2;
    x.sum_x4 += y.sum_x4;
    x.trace.twice_area += y.trace.twice_area;
    x.trace.elapsed += y.trace.elapsed;
    x.trace.resets.insert(x.trace.resets.end(), y.trace.resets.begin(),
                          y.trace.resets.end());
  }
  a.events.a += b.events.a;
  a.events.b += b.events.b;
  a.events.c += b.events.c;
  a.events.block_a2 += b.events.block_a2;
  a.events.block_b2 += b.events.block_b2;
  a.events.block_c2 += b.events.block_c2;
  for (std::size_t e = 0; e < a.erasure_histogram.size(); ++e) {
    a.erasure_histogram[e] += b.erasure_histogram[e];
  }
  a.blocks += b.blocks;
  a.blocks_total += b.blocks_total;
  a.no_delivery = false;
  for (const SourceStats& st : a.sources) {
    if (st.deliveries == 0) a.no_delivery = true;
  }
}

SimReport simulate_replicated(const SimConfig& cfg, int replications,
                              int threads) {
  if (replications < 1) throw std::invalid_argument("replications must be >= 1");
  cfg.validate();
  std::vector<SimReport> parts(static_cast<std::size_t>(replications));
  std::atomic<int> next{0};
  const auto worker = [&] {
    for (int r = next++; r < replications; r = next++) {
      SimConfig c = cfg;
      c.seed = cfg.seed + static_cast<std::uint64_t>(r);
      parts[static_cast<std::size_t>(r)] = simulate(c);
    }
  };
  const int workers = std::clamp(threads, 1, replications);
  std::vector<std::thread> pool;
  for (int t = 1; t < workers; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  SimReport merged = std::move(parts.front());
  for (std::size_t r = 1; r < parts.size(); ++r) merge_into(merged, parts[r]);
  return merged;
}

std::int64_t polygon_twice_area(const std::vector<ResetEvent>& resets) {
  std::int64_t total = 0;
  for (std::size_t j = 1; j < resets.size(); ++j) {
    const std::int64_t x = resets[j].time - resets[j - 1].time;
    const std::int64_t lo = resets[j - 1].value;
    // Trapezoid with parallel sides lo and lo + x, width x.
    total += (lo + (lo + x)) * x;
  }
  return total;
}

double ErasureHistogram::frequency(int e) const {
  if (windows == 0 || e < 0 || e > n) return 0.0;
  return static_cast<double>(counts[static_cast<std::size_t>(e)]) /
         static_cast<double>(windows);
}

double ErasureHistogram::mean() const {
  if (windows == 0) return 0.0;
  double s = 0.0;
  for (int e = 0; e <= n; ++e) {
    s += static_cast<double>(e) * static_cast<double>(counts[static_cast<std::size_t>(e)]);
  }
  return s / static_cast<double>(windows);
}

ErasureHistogram estimate_erasure_pmf(int n, std::int64_t windows,
                                      const GEParams& params,
                                      std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("window length must be at least 1");
  if (windows < 1) throw std::invalid_argument("windows must be at least 1");
  GilbertElliottChannel channel(params, seed);
  ErasureHistogram h;
  h.n = n;
  h.windows = windows;
  h.counts.assign(static_cast<std::size_t>(n) + 1, 0);
  for (std::int64_t w = 0; w < windows; ++w) {
    if (w > 0) channel.restart_stationary();
    int e = 0;
    for (int t = 0; t < n; ++t) e += channel.transmit() ? 1 : 0;
    ++h.counts[static_cast<std::size_t>(e)];
  }
  return h;
}

SimComparison compare_with_analysis(const SimConfig& cfg,
                                    const SimReport& report) {
  const SystemConfig sys =
      cfg.coded ? cfg.system
                : SystemConfig::uncoded(cfg.system.sources(), cfg.system.ell());
  SimComparison out;
  out.predicted_events = event_probs(sys, cfg.channel);
  const EventProbabilities& ev = out.predicted_events;
  out.z_a = z_score(report.freq_a(), ev.p_a, report.se_a());
  out.z_b = z_score(report.freq_b(), ev.p_b, report.se_b());
  out.z_c = z_score(report.freq_c(), ev.p_c, report.se_c());

  for (const SourceStats& st : report.sources) {
    SourceComparison c;
    c.source = st.source;
    c.position = st.position;
    c.empirical_aoi = st.mean_aoi();
    c.predicted_aoi = coded_aoi_exact(st.source, sys, ev).mean_aoi;
    c.relative_error =
        std::isfinite(c.empirical_aoi) && std::isfinite(c.predicted_aoi)
            ? std::abs(c.empirical_aoi - c.predicted_aoi) / c.predicted_aoi
            : std::numeric_limits<double>::infinity();
    const InterarrivalMoments m = coded_interarrival_moments(sys, ev, st.source);
    c.empirical_x = st.mean_x();
    c.predicted_x = m.mean;
    c.se_x = st.se_x();
    c.empirical_x2 = st.mean_x2();
    c.predicted_x2 = m.second_moment;
    c.se_x2 = st.se_x2();
    out.max_relative_error = std::max(out.max_relative_error, c.relative_error);
    out.sources.push_back(c);
  }
  return out;
}

}  // namespace aoimds
