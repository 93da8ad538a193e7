#include "aoimds/aoimds.h"

#include <cmath>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <stdexcept>
#include <string>

#include "aoimds/aoi_analysis.h"
#include "aoimds/channel_model.h"
#include "aoimds/config_io.h"
#include "aoimds/erasure_distribution.h"
#include "aoimds/rate_sweep.h"
#include "aoimds/simulator.h"

struct aoimds_channel {
  aoimds::GilbertElliottChannel impl;
};

struct aoimds_sweep {
  aoimds::SweepResult impl;
};

struct aoimds_simulation {
  aoimds::SimConfigFile config;
  aoimds::SimReport report;
  aoimds::SimComparison comparison;
};

namespace {

thread_local std::string g_last_error;

struct BufferTooSmall : std::length_error {
  using std::length_error::length_error;
};

aoimds_status fail(aoimds_status status, const char* message) {
  g_last_error = message;
  return status;
}

template <typename F>
aoimds_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return AOIMDS_OK;
  } catch (const BufferTooSmall& e) {
    return fail(AOIMDS_ERR_BUFFER_TOO_SMALL, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(AOIMDS_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::domain_error& e) {
    return fail(AOIMDS_ERR_DOMAIN, e.what());
  } catch (const std::out_of_range& e) {
    return fail(AOIMDS_ERR_OUT_OF_RANGE, e.what());
  } catch (const std::bad_alloc&) {
    return fail(AOIMDS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(AOIMDS_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(AOIMDS_ERR_INTERNAL, "unknown error");
  }
}

void require(const void* ptr, const char* name) {
  if (ptr == nullptr) {
    throw std::invalid_argument(std::string(name) + " must not be NULL");
  }
}

aoimds::GEParams to_params(const aoimds_ge_params* p) {
  require(p, "params");
  aoimds::GEParams out{p->alpha, p->beta, p->eps0, p->eps1};
  out.validate();
  return out;
}

aoimds::SystemConfig to_system(const aoimds_system* s) {
  require(s, "system");
  return aoimds::SystemConfig::create(s->sources, s->ell, s->n, s->k);
}

aoimds_aoi to_c(const aoimds::AoiResult& r) {
  aoimds_aoi out{};
  out.mean_aoi = r.mean_aoi;
  out.finite = r.finite ? 1 : 0;
  if (r.components) {
    out.main_term = r.components->main;
    out.position_term = r.components->position;
    out.ell_term = r.components->ell;
  } else {
    out.main_term = out.position_term = out.ell_term = r.mean_aoi;
  }
  return out;
}

char* duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* aoimds_last_error(void) { return g_last_error.c_str(); }

const char* aoimds_version(void) { return "1.0.0"; }

void aoimds_string_free(char* s) { std::free(s); }

aoimds_status aoimds_ge_validate(const aoimds_ge_params* params) {
  return guarded([&] { to_params(params); });
}

aoimds_status aoimds_ge_from_json(const char* json_text, aoimds_ge_params* out) {
  if (json_text == nullptr || out == nullptr) {
    return fail(AOIMDS_ERR_INVALID_ARGUMENT, "json_text and out must not be NULL");
  }
  try {
    const aoimds::GEParams p = aoimds::parse_ge_params(json_text);
    *out = {p.alpha, p.beta, p.eps0, p.eps1};
    g_last_error.clear();
    return AOIMDS_OK;
  } catch (const std::domain_error& e) {
    return fail(AOIMDS_ERR_DOMAIN, e.what());
  } catch (const std::exception& e) {
    return fail(AOIMDS_ERR_PARSE, e.what());
  }
}

aoimds_status aoimds_steady_state_good(const aoimds_ge_params* params,
                                       double* out) {
  return guarded([&] {
    require(out, "out");
    *out = aoimds::steady_state_good(to_params(params));
  });
}

aoimds_status aoimds_marginal_erasure_prob(const aoimds_ge_params* params,
                                           double* out) {
  return guarded([&] {
    require(out, "out");
    *out = aoimds::marginal_erasure_prob(to_params(params));
  });
}

aoimds_status aoimds_reverse_states(const aoimds_ge_params* params,
                                    aoimds_ge_params* out) {
  return guarded([&] {
    require(params, "params");
    require(out, "out");
    const aoimds::GEParams r = aoimds::reverse_states(
        {params->alpha, params->beta, params->eps0, params->eps1});
    *out = {r.alpha, r.beta, r.eps0, r.eps1};
  });
}

aoimds_status aoimds_channel_create(const aoimds_ge_params* params,
                                    uint64_t seed, aoimds_channel** out) {
  return guarded([&] {
    require(out, "out");
    *out = new aoimds_channel{aoimds::GilbertElliottChannel(to_params(params), seed)};
  });
}

int aoimds_channel_transmit(aoimds_channel* channel) {
  return channel != nullptr && channel->impl.transmit() ? 1 : 0;
}

int aoimds_channel_state(const aoimds_channel* channel) {
  if (channel == nullptr) return -1;
  return static_cast<int>(channel->impl.state());
}

void aoimds_channel_destroy(aoimds_channel* channel) { delete channel; }

int aoimds_closed_form_max_n(void) { return aoimds::kDefaultClosedFormMaxN; }

aoimds_status aoimds_erasure_pmf(const aoimds_ge_params* params, int n,
                                 aoimds_pmf_method method, double* probs,
                                 size_t len) {
  return guarded([&] {
    require(probs, "probs");
    const aoimds::GEParams p = to_params(params);
    if (n < 1) throw std::invalid_argument("n must be at least 1");
    if (len < static_cast<size_t>(n) + 1) {
      throw BufferTooSmall("output buffer must hold n + 1 values");
    }
    const aoimds::ErasureCountPmf pmf = method == AOIMDS_PMF_CLOSED_FORM
                                            ? aoimds::erasure_pmf_closed(n, p)
                                            : aoimds::erasure_pmf_dp(n, p);
    std::copy(pmf.probs.begin(), pmf.probs.end(), probs);
  });
}

aoimds_status aoimds_bep_mds(const aoimds_ge_params* params, int n, int k,
                             double* out) {
  return guarded([&] {
    require(out, "out");
    if (n < 1) throw std::invalid_argument("n must be at least 1");
    if (k < 1) throw std::invalid_argument("k must be at least 1");
    *out = aoimds::bep_mds(n, k, to_params(params));
  });
}

aoimds_status aoimds_estimate_erasure_pmf(const aoimds_ge_params* params,
                                          int n, int64_t windows,
                                          uint64_t seed, int64_t* counts,
                                          size_t len) {
  return guarded([&] {
    require(counts, "counts");
    const aoimds::GEParams p = to_params(params);
    if (n < 1) throw std::invalid_argument("n must be at least 1");
    if (len < static_cast<size_t>(n) + 1) {
      throw BufferTooSmall("output buffer must hold n + 1 values");
    }
    const aoimds::ErasureHistogram h = aoimds::estimate_erasure_pmf(n, windows, p, seed);
    std::copy(h.counts.begin(), h.counts.end(), counts);
  });
}

aoimds_status aoimds_uncoded_aoi(int64_t sources, int64_t ell, double p,
                                 aoimds_uncoded_mode mode, aoimds_aoi* out) {
  return guarded([&] {
    require(out, "out");
    *out = to_c(aoimds::uncoded_aoi(sources, ell, p,
                                    mode == AOIMDS_UNCODED_LARGE_K
                                        ? aoimds::UncodedMode::kLargeK
                                        : aoimds::UncodedMode::kExact));
  });
}

aoimds_status aoimds_event_probs(const aoimds_system* system,
                                 const aoimds_ge_params* params,
                                 aoimds_events* out) {
  return guarded([&] {
    require(out, "out");
    const aoimds::EventProbabilities ev =
        aoimds::event_probs(to_system(system), to_params(params));
    *out = {ev.p_a, ev.p_b, ev.p_c};
  });
}

aoimds_status aoimds_interarrival_moments(const aoimds_system* system,
                                          const aoimds_events* events,
                                          int64_t source, aoimds_moments* out) {
  return guarded([&] {
    require(events, "events");
    require(out, "out");
    const aoimds::InterarrivalMoments m = aoimds::coded_interarrival_moments(
        to_system(system), {events->p_a, events->p_b, events->p_c}, source);
    *out = {m.mean, m.second_moment, m.finite ? 1 : 0};
  });
}

aoimds_status aoimds_coded_aoi_exact(const aoimds_system* system,
                                     const aoimds_ge_params* params,
                                     int64_t source, aoimds_aoi* out) {
  return guarded([&] {
    require(out, "out");
    *out = to_c(aoimds::coded_aoi_exact(source, to_system(system), to_params(params)));
  });
}

aoimds_status aoimds_coded_aoi_approx(const aoimds_system* system,
                                      const aoimds_ge_params* params,
                                      aoimds_aoi* out, int* large_k_valid,
                                      double* large_k_bound) {
  return guarded([&] {
    require(out, "out");
    const aoimds::ApproxAoi a =
        aoimds::coded_aoi_approx(to_system(system), to_params(params));
    *out = to_c(a.aoi);
    if (large_k_valid) *large_k_valid = a.large_k_valid ? 1 : 0;
    if (large_k_bound) *large_k_bound = a.large_k_bound;
  });
}

aoimds_status aoimds_gaussian_aoi(double c_n, int n, int64_t sources,
                                  int64_t ell, double p, aoimds_aoi* out) {
  return guarded([&] {
    require(out, "out");
    *out = to_c(aoimds::gaussian_aoi(c_n, n, sources, ell, p));
  });
}

aoimds_status aoimds_region_aoi(double c_n, int n, int64_t sources,
                                int64_t ell, double p, double c_eps,
                                aoimds_aoi* out, int* region) {
  return guarded([&] {
    require(out, "out");
    const aoimds::RegionAoi r = aoimds::region_aoi(c_n, n, sources, ell, p, c_eps);
    *out = to_c(r.aoi);
    if (region) *region = static_cast<int>(r.region);
  });
}

aoimds_status aoimds_calibrate_c_eps(double eps, double* out) {
  return guarded([&] {
    require(out, "out");
    *out = aoimds::calibrate_c_eps(eps);
  });
}

aoimds_status aoimds_optimal_k(const aoimds_ge_params* params, int n,
                               int64_t sources, int64_t ell, int* k_star,
                               aoimds_aoi* out) {
  return guarded([&] {
    require(k_star, "k_star");
    const aoimds::OptimalK opt = aoimds::optimal_k(n, to_params(params), sources, ell);
    *k_star = opt.k_star;
    if (out) *out = to_c(opt.aoi);
  });
}

aoimds_status aoimds_coding_gain(const aoimds_ge_params* params, int n,
                                 int64_t sources, int64_t ell,
                                 aoimds_gain* out) {
  return guarded([&] {
    require(out, "out");
    const aoimds::CodingGain g = aoimds::coding_gain(n, to_params(params), sources, ell);
    out->gain = g.gain;
    out->ceiling = g.ceiling;
    out->k_star = g.k_star;
    out->coded = to_c(g.coded);
    out->uncoded = to_c(g.uncoded);
  });
}

aoimds_status aoimds_sweep_run(const aoimds_ge_params* params, int n,
                               int64_t sources, int64_t ell, int k_min,
                               int k_max, int threads, aoimds_sweep** out) {
  return guarded([&] {
    require(out, "out");
    auto sweep = std::make_unique<aoimds_sweep>();
    sweep->impl = aoimds::rate_sweep(n, to_params(params), sources, ell, k_min,
                                     k_max, threads > 0 ? threads : 1);
    *out = sweep.release();
  });
}

size_t aoimds_sweep_size(const aoimds_sweep* sweep) {
  return sweep ? sweep->impl.rows.size() : 0;
}

aoimds_status aoimds_sweep_row_at(const aoimds_sweep* sweep, size_t index,
                                  aoimds_sweep_row* out) {
  return guarded([&] {
    require(sweep, "sweep");
    require(out, "out");
    if (index >= sweep->impl.rows.size()) throw std::out_of_range("row index");
    const aoimds::SweepRow& r = sweep->impl.rows[index];
    *out = {};
    out->n = r.n;
    out->k = r.k;
    out->rate = r.rate;
    out->p_c = r.p_c;
    out->aoi_approx = r.aoi_approx;
    out->aoi_uncoded = r.aoi_uncoded;
    out->gain = r.gain;
    out->finite = r.finite ? 1 : 0;
    out->has_gaussian = r.aoi_gaussian.has_value() ? 1 : 0;
    out->aoi_gaussian = r.aoi_gaussian.value_or(std::nan(""));
    out->c_n = r.c_n.value_or(std::nan(""));
    out->region = r.region ? static_cast<int>(*r.region) : 0;
  });
}

aoimds_status aoimds_sweep_get_summary(const aoimds_sweep* sweep,
                                       aoimds_sweep_summary* out) {
  return guarded([&] {
    require(sweep, "sweep");
    require(out, "out");
    const aoimds::SweepSummary& s = sweep->impl.summary;
    *out = {s.k_star, s.rate,    s.aoi_star, s.aoi_uncoded,
            s.gain,   s.ceiling, s.c_eps,    s.finite ? 1 : 0};
  });
}

void aoimds_sweep_destroy(aoimds_sweep* sweep) { delete sweep; }

aoimds_status aoimds_simulation_run_json(const char* config_json, int threads,
                                         aoimds_simulation** out) {
  if (config_json == nullptr || out == nullptr) {
    return fail(AOIMDS_ERR_INVALID_ARGUMENT, "config_json and out must not be NULL");
  }
  aoimds::SimConfigFile file;
  try {
    file = aoimds::parse_sim_config(config_json);
  } catch (const std::exception& e) {
    return fail(AOIMDS_ERR_PARSE, e.what());
  }
  return guarded([&] {
    auto sim = std::make_unique<aoimds_simulation>();
    sim->config = file;
    sim->report = file.replications == 1
                      ? aoimds::simulate(file.config)
                      : aoimds::simulate_replicated(file.config, file.replications,
                                                    threads > 0 ? threads : 1);
    sim->comparison = aoimds::compare_with_analysis(file.config, sim->report);
    *out = sim.release();
  });
}

int aoimds_simulation_no_delivery(const aoimds_simulation* sim) {
  return sim != nullptr && sim->report.no_delivery ? 1 : 0;
}

double aoimds_simulation_max_relative_error(const aoimds_simulation* sim) {
  return sim ? sim->comparison.max_relative_error : std::nan("");
}

aoimds_status aoimds_simulation_report_json(const aoimds_simulation* sim,
                                            char** out) {
  return guarded([&] {
    require(sim, "sim");
    require(out, "out");
    *out = duplicate(aoimds::report_to_json(sim->config, sim->report, sim->comparison));
  });
}

aoimds_status aoimds_simulation_report_csv(const aoimds_simulation* sim,
                                           char** out) {
  return guarded([&] {
    require(sim, "sim");
    require(out, "out");
    *out = duplicate(aoimds::report_to_csv(sim->report, sim->comparison));
  });
}

void aoimds_simulation_destroy(aoimds_simulation* sim) { delete sim; }

size_t aoimds_format_double(double v, char* buf, size_t len) {
  const std::string s = aoimds::format_double(v);
  if (buf != nullptr && len > 0) {
    const size_t n = std::min(len - 1, s.size());
    std::memcpy(buf, s.data(), n);
    buf[n] = '\0';
  }
  return s.size();
}

}  // extern "C"
