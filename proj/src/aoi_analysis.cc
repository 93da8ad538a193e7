#include "aoimds/aoi_analysis.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace aoimds {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// period (1 + pc) / (2 (1 - pc)): the sawtooth term shared by every mean-age
// formula. Keeping one expression makes the k = n reduction bit-exact.
double sawtooth_term(double period, double pc) {
  return period * (1.0 + pc) / (2.0 * (1.0 - pc));
}

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument(std::string(what) + " must lie in [0,1]");
  }
}

void check_counts(std::int64_t sources, std::int64_t ell) {
  if (sources < 1) throw std::invalid_argument("K must be at least 1");
  if (ell < 1) throw std::invalid_argument("ell must be at least 1");
}

}  // namespace

SystemConfig SystemConfig::create(std::int64_t sources, std::int64_t ell,
                                  int n, int k) {
  check_counts(sources, ell);
  if (k < 1 || n < k) {
    throw std::invalid_argument("code parameters must satisfy 1 <= k <= n");
  }
  return SystemConfig(sources, ell, n, k);
}

SystemConfig SystemConfig::uncoded(std::int64_t sources, std::int64_t ell) {
  return create(sources, ell, 1, 1);
}

double SystemConfig::lambda() const {
  return static_cast<double>(sources_) / static_cast<double>(k_);
}

double SystemConfig::round_slots() const {
  return static_cast<double>(sources_ * n_ * ell_) / static_cast<double>(k_);
}

int SystemConfig::position(std::int64_t source) const {
  if (source < 0 || source >= sources_) {
    throw std::out_of_range("source index must lie in [0, K)");
  }
  return static_cast<int>(source % k_);
}

AoiResult AoiResult::divergent() {
  AoiResult r;
  r.mean_aoi = kInf;
  r.finite = false;
  return r;
}

AoiResult uncoded_aoi(std::int64_t sources, std::int64_t ell, double p,
                      UncodedMode mode) {
  check_counts(sources, ell);
  check_probability(p, "erasure probability");
  if (p >= 1.0) return AoiResult::divergent();
  AoiComponents c;
  c.main = sawtooth_term(static_cast<double>(sources * ell), p);
  c.ell = mode == UncodedMode::kExact ? static_cast<double>(ell) : 0.0;
  AoiResult r;
  r.mean_aoi = c.main + c.ell;
  r.components = c;
  return r;
}

InterarrivalAtom uncoded_interarrival_pmf(std::int64_t x, double p,
                                          std::int64_t sources,
                                          std::int64_t ell) {
  check_counts(sources, ell);
  check_probability(p, "erasure probability");
  if (x < 1) throw std::invalid_argument("attempt count must be at least 1");
  InterarrivalAtom atom;
  atom.slots = static_cast<double>(x) * static_cast<double>(sources * ell);
  atom.probability = (1.0 - p) * std::pow(p, static_cast<double>(x - 1));
  return atom;
}

EventProbabilities event_probs(double p, const ErasureCountPmf& others, int k) {
  check_probability(p, "erasure probability");
  const double bep = bep_mds(others, k);
  return {1.0 - p, p * (1.0 - bep), p * bep};
}

EventProbabilities event_probs(const SystemConfig& cfg, const GEParams& params) {
  const double p = marginal_erasure_prob(params);
  return event_probs(p, erasure_pmf_dp(cfg.n() - 1, params), cfg.k());
}

InterarrivalMoments coded_interarrival_moments(const SystemConfig& cfg,
                                               const EventProbabilities& ev,
                                               std::int64_t source) {
  const int pos = cfg.position(source);
  InterarrivalMoments m;
  if (ev.p_c >= 1.0) {
    m.mean = m.second_moment = kInf;
    m.finite = false;
    return m;
  }
  const double period = cfg.round_slots();
  const double shift = static_cast<double>((cfg.n() - pos) * cfg.ell());
  const double q = 1.0 - ev.p_c;
  m.mean = period / q;
  m.second_moment = ((1.0 + ev.p_c) * period * period +
                     2.0 * ev.p_a * ev.p_b * shift * shift) /
                    (q * q);
  return m;
}

AoiResult coded_aoi_exact(std::int64_t source, const SystemConfig& cfg,
                          const EventProbabilities& ev) {
  const int pos = cfg.position(source);
  if (ev.p_c >= 1.0) return AoiResult::divergent();
  const double period = cfg.round_slots();
  const double shift = static_cast<double>((cfg.n() - pos) * cfg.ell());
  AoiComponents c;
  c.main = sawtooth_term(period, ev.p_c);
  c.position = ev.p_a * ev.p_b * shift * shift / (period * (1.0 - ev.p_c));
  c.ell = static_cast<double>(cfg.ell());
  AoiResult r;
  r.mean_aoi = c.main + c.position + c.ell;
  r.components = c;
  return r;
}

AoiResult coded_aoi_exact(std::int64_t source, const SystemConfig& cfg,
                          const GEParams& params) {
  params.validate();
  return coded_aoi_exact(source, cfg, event_probs(cfg, params));
}

ApproxAoi coded_aoi_approx(const SystemConfig& cfg,
                           const EventProbabilities& ev) {
  ApproxAoi out;
  if (ev.p_c >= 1.0) {
    out.aoi = AoiResult::divergent();
    out.large_k_bound = kInf;
    return out;
  }
  AoiComponents c;
  c.main = sawtooth_term(cfg.round_slots(), ev.p_c);
  out.aoi.mean_aoi = c.main;
  out.aoi.components = c;

  const double ell = static_cast<double>(cfg.ell());
  const double shift = static_cast<double>(cfg.n()) * ell;
  const double position_bound = std::sqrt(
      2.0 * ev.p_a * ev.p_b * shift * shift / (ell * ell * (1.0 + ev.p_c)));
  const double ell_bound = 2.0 * (1.0 - ev.p_c) / (1.0 + ev.p_c);
  out.large_k_bound = std::max(position_bound, ell_bound);
  out.large_k_valid =
      static_cast<double>(cfg.sources()) >= kLargeKFactor * out.large_k_bound;
  return out;
}

ApproxAoi coded_aoi_approx(const SystemConfig& cfg, const GEParams& params) {
  params.validate();
  return coded_aoi_approx(cfg, event_probs(cfg, params));
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double k_bar_from_c(double c_n, int n, double p) {
  const double nd = static_cast<double>(n);
  return nd - nd * p + c_n * std::sqrt(nd * p * (1.0 - p));
}

double c_from_k(double k_bar, int n, double p) {
  const double nd = static_cast<double>(n);
  const double spread = std::sqrt(nd * p * (1.0 - p));
  if (!(spread > 0.0)) {
    throw std::domain_error("c_n is undefined when P is 0 or 1");
  }
  return (k_bar - nd * (1.0 - p)) / spread;
}

GaussianApprox gaussian_params(double c_n, int n, double p, double c_eps) {
  GaussianApprox g;
  g.c_n = c_n;
  g.k_bar = k_bar_from_c(c_n, n, p);
  g.c_eps = c_eps;
  if (c_n < -c_eps) {
    g.region = Region::kRegion1;
  } else if (c_n > c_eps) {
    g.region = Region::kRegion2;
  } else {
    g.region = Region::kRegion3;
  }
  return g;
}

namespace {

double rate_factor(double c_n, int n, double p) {
  if (n < 1) throw std::invalid_argument("n must be at least 1");
  const double rate =
      1.0 - p + c_n * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
  if (!(rate > 0.0) || rate > 1.0 + 1e-12) {
    throw std::domain_error("k_bar/n must lie in (0, 1]");
  }
  return rate;
}

}  // namespace

AoiResult gaussian_aoi(double c_n, int n, std::int64_t sources,
                       std::int64_t ell, double p) {
  check_counts(sources, ell);
  check_probability(p, "erasure probability");
  const double rate = rate_factor(c_n, n, p);
  const double pc = p * normal_cdf(c_n);
  if (pc >= 1.0) return AoiResult::divergent();
  AoiComponents c;
  c.main = sawtooth_term(static_cast<double>(sources * ell), pc) / rate;
  AoiResult r;
  r.mean_aoi = c.main;
  r.components = c;
  return r;
}

RegionAoi region_aoi(double c_n, int n, std::int64_t sources,
                     std::int64_t ell, double p, double c_eps) {
  check_counts(sources, ell);
  check_probability(p, "erasure probability");
  if (!(c_eps > 0.0)) throw std::invalid_argument("c_eps must be positive");
  const double rate = rate_factor(c_n, n, p);
  const double kl = static_cast<double>(sources * ell);

  RegionAoi out;
  out.region = gaussian_params(c_n, n, p, c_eps).region;
  double value = 0.0;
  switch (out.region) {
    case Region::kRegion1:
      value = kl / (2.0 * rate);
      break;
    case Region::kRegion2:
      if (p >= 1.0) {
        out.aoi = AoiResult::divergent();
        return out;
      }
      value = kl * (1.0 + p) / (2.0 * rate * (1.0 - p));
      break;
    case Region::kRegion3: {
      if (p >= 1.0) {
        out.aoi = AoiResult::divergent();
        return out;
      }
      const double phi_lin = (c_n + c_eps) / (2.0 * c_eps);
      value = sawtooth_term(kl, p * phi_lin) / (1.0 - p);
      break;
    }
  }
  out.aoi.mean_aoi = value;
  out.aoi.components = AoiComponents{value, 0.0, 0.0};
  return out;
}

double calibrate_c_eps(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw std::invalid_argument("eps must lie in (0, 1)");
  }
  const auto tail = [](double c) { return std::exp(-c * c) / c; };
  double lo = 1e-300;  // tail(lo) is huge
  double hi = 1.0;
  while (tail(hi) > eps) {
    lo = hi;
    hi *= 2.0;
  }
  // Run to floating-point convergence so hi is the smallest representable
  // c with tail(c) <= eps.
  for (int i = 0; i < 2000; ++i) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (tail(mid) <= eps) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

OptimalK optimal_k(int n, const GEParams& params, std::int64_t sources,
                   std::int64_t ell) {
  params.validate();
  check_counts(sources, ell);
  if (n < 1) throw std::invalid_argument("n must be at least 1");
  const double p = marginal_erasure_prob(params);
  const ErasureCountPmf others = erasure_pmf_dp(n - 1, params);

  OptimalK best;
  for (int k = 1; k <= n; ++k) {
    const SystemConfig cfg = SystemConfig::create(sources, ell, n, k);
    const AoiResult aoi = coded_aoi_approx(cfg, event_probs(p, others, k)).aoi;
    if (best.k_star == 0 || aoi.mean_aoi <= best.aoi.mean_aoi) {
      best.k_star = k;
      best.aoi = aoi;
    }
  }
  return best;
}

CodingGain coding_gain(int n, const GEParams& params, std::int64_t sources,
                       std::int64_t ell) {
  params.validate();
  const double p = marginal_erasure_prob(params);
  if (p >= 1.0) {
    throw std::domain_error("coding gain is undefined when P = 1");
  }
  const OptimalK opt = optimal_k(n, params, sources, ell);
  CodingGain g;
  g.k_star = opt.k_star;
  g.coded = opt.aoi;
  g.uncoded = uncoded_aoi(sources, ell, p, UncodedMode::kLargeK);
  g.gain = g.uncoded.mean_aoi / g.coded.mean_aoi;
  g.ceiling = 1.0 + p;
  return g;
}

}  // namespace aoimds
