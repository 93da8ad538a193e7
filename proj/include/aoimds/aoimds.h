/*
 * aoimds: mean age of information for round-robin multi-source status
 * updates over a Gilbert-Elliott erasure channel, uncoded and with (n,k)
 * MDS block codes.
 *
 * C interface of the shared library. Every function that can fail returns an
 * aoimds_status; on failure a human-readable message is available from
 * aoimds_last_error() on the calling thread. Handles are opaque and owned by
 * the caller, who releases them with the matching *_destroy function.
 * Strings returned through char** are released with aoimds_string_free().
 */
#ifndef AOIMDS_AOIMDS_H_
#define AOIMDS_AOIMDS_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(AOIMDS_BUILDING_LIBRARY)
#define AOIMDS_API __declspec(dllexport)
#else
#define AOIMDS_API __declspec(dllimport)
#endif
#else
#define AOIMDS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum aoimds_status {
  AOIMDS_OK = 0,
  AOIMDS_ERR_INVALID_ARGUMENT = 1, /* argument outside its documented range */
  AOIMDS_ERR_DOMAIN = 2,           /* parameters valid but quantity undefined */
  AOIMDS_ERR_OUT_OF_RANGE = 3,     /* e.g. closed form beyond its window cap */
  AOIMDS_ERR_PARSE = 4,            /* malformed or invalid JSON config */
  AOIMDS_ERR_BUFFER_TOO_SMALL = 5,
  AOIMDS_ERR_INTERNAL = 6
} aoimds_status;

AOIMDS_API const char* aoimds_last_error(void);
AOIMDS_API const char* aoimds_version(void);
AOIMDS_API void aoimds_string_free(char* s);

/* ---- channel ------------------------------------------------------------ */

typedef struct aoimds_ge_params {
  double alpha; /* P(Good -> Bad) */
  double beta;  /* P(Bad -> Good) */
  double eps0;  /* erasure probability in Good */
  double eps1;  /* erasure probability in Bad */
} aoimds_ge_params;

AOIMDS_API aoimds_status aoimds_ge_validate(const aoimds_ge_params* params);
AOIMDS_API aoimds_status aoimds_ge_from_json(const char* json_text,
                                             aoimds_ge_params* out);
AOIMDS_API aoimds_status aoimds_steady_state_good(const aoimds_ge_params* params,
                                                  double* out);
AOIMDS_API aoimds_status aoimds_marginal_erasure_prob(
    const aoimds_ge_params* params, double* out);
AOIMDS_API aoimds_status aoimds_reverse_states(const aoimds_ge_params* params,
                                               aoimds_ge_params* out);

typedef struct aoimds_channel aoimds_channel;

/* Sampler started from the stationary law. */
AOIMDS_API aoimds_status aoimds_channel_create(const aoimds_ge_params* params,
                                               uint64_t seed,
                                               aoimds_channel** out);
/* Returns 1 if the packet was erased, 0 otherwise. */
AOIMDS_API int aoimds_channel_transmit(aoimds_channel* channel);
/* 0 = Good, 1 = Bad. */
AOIMDS_API int aoimds_channel_state(const aoimds_channel* channel);
AOIMDS_API void aoimds_channel_destroy(aoimds_channel* channel);

/* ---- erasure counts ----------------------------------------------------- */

typedef enum aoimds_pmf_method {
  AOIMDS_PMF_DYNAMIC_PROGRAM = 0,
  AOIMDS_PMF_CLOSED_FORM = 1
} aoimds_pmf_method;

/* Largest n accepted by AOIMDS_PMF_CLOSED_FORM. */
AOIMDS_API int aoimds_closed_form_max_n(void);

/* Writes P(n, e), e = 0..n, into probs; len must be at least n + 1. */
AOIMDS_API aoimds_status aoimds_erasure_pmf(const aoimds_ge_params* params,
                                            int n, aoimds_pmf_method method,
                                            double* probs, size_t len);
AOIMDS_API aoimds_status aoimds_bep_mds(const aoimds_ge_params* params, int n,
                                        int k, double* out);
/* Empirical counts over independent stationary windows; len >= n + 1. */
AOIMDS_API aoimds_status aoimds_estimate_erasure_pmf(
    const aoimds_ge_params* params, int n, int64_t windows, uint64_t seed,
    int64_t* counts, size_t len);

/* ---- mean age ----------------------------------------------------------- */

typedef struct aoimds_system {
  int64_t sources; /* K */
  int64_t ell;     /* packet length in slots */
  int n;           /* coded block length */
  int k;           /* data packets per block */
} aoimds_system;

typedef struct aoimds_aoi {
  double mean_aoi; /* +inf when divergent */
  int finite;
  double main_term;
  double position_term;
  double ell_term;
} aoimds_aoi;

typedef struct aoimds_events {
  double p_a;
  double p_b;
  double p_c;
} aoimds_events;

typedef struct aoimds_moments {
  double mean;
  double second_moment;
  int finite;
} aoimds_moments;

typedef enum aoimds_uncoded_mode {
  AOIMDS_UNCODED_EXACT = 0,
  AOIMDS_UNCODED_LARGE_K = 1
} aoimds_uncoded_mode;

AOIMDS_API aoimds_status aoimds_uncoded_aoi(int64_t sources, int64_t ell,
                                            double p, aoimds_uncoded_mode mode,
                                            aoimds_aoi* out);
AOIMDS_API aoimds_status aoimds_event_probs(const aoimds_system* system,
                                            const aoimds_ge_params* params,
                                            aoimds_events* out);
AOIMDS_API aoimds_status aoimds_interarrival_moments(
    const aoimds_system* system, const aoimds_events* events, int64_t source,
    aoimds_moments* out);
AOIMDS_API aoimds_status aoimds_coded_aoi_exact(const aoimds_system* system,
                                                const aoimds_ge_params* params,
                                                int64_t source,
                                                aoimds_aoi* out);
/* large_k_valid / large_k_bound may be NULL. */
AOIMDS_API aoimds_status aoimds_coded_aoi_approx(
    const aoimds_system* system, const aoimds_ge_params* params,
    aoimds_aoi* out, int* large_k_valid, double* large_k_bound);

AOIMDS_API aoimds_status aoimds_gaussian_aoi(double c_n, int n,
                                             int64_t sources, int64_t ell,
                                             double p, aoimds_aoi* out);
/* region receives 1, 2 or 3. */
AOIMDS_API aoimds_status aoimds_region_aoi(double c_n, int n, int64_t sources,
                                           int64_t ell, double p, double c_eps,
                                           aoimds_aoi* out, int* region);
AOIMDS_API aoimds_status aoimds_calibrate_c_eps(double eps, double* out);

AOIMDS_API aoimds_status aoimds_optimal_k(const aoimds_ge_params* params,
                                          int n, int64_t sources, int64_t ell,
                                          int* k_star, aoimds_aoi* out);

typedef struct aoimds_gain {
  double gain;
  double ceiling; /* 1 + P */
  int k_star;
  aoimds_aoi coded;
  aoimds_aoi uncoded;
} aoimds_gain;

AOIMDS_API aoimds_status aoimds_coding_gain(const aoimds_ge_params* params,
                                            int n, int64_t sources,
                                            int64_t ell, aoimds_gain* out);

/* ---- rate sweep --------------------------------------------------------- */

typedef struct aoimds_sweep aoimds_sweep;

typedef struct aoimds_sweep_row {
  int n;
  int k;
  double rate;
  double p_c;
  double aoi_approx;
  double aoi_gaussian; /* valid only when has_gaussian */
  double aoi_uncoded;
  double gain;
  double c_n;   /* valid only when has_gaussian */
  int region;   /* 1..3, 0 when has_gaussian == 0 */
  int has_gaussian;
  int finite;
} aoimds_sweep_row;

typedef struct aoimds_sweep_summary {
  int k_star;
  double rate;
  double aoi_star;
  double aoi_uncoded;
  double gain;
  double ceiling;
  double c_eps;
  int finite;
} aoimds_sweep_summary;

/* threads <= 0 means one worker. */
AOIMDS_API aoimds_status aoimds_sweep_run(const aoimds_ge_params* params,
                                          int n, int64_t sources, int64_t ell,
                                          int k_min, int k_max, int threads,
                                          aoimds_sweep** out);
AOIMDS_API size_t aoimds_sweep_size(const aoimds_sweep* sweep);
AOIMDS_API aoimds_status aoimds_sweep_row_at(const aoimds_sweep* sweep,
                                             size_t index,
                                             aoimds_sweep_row* out);
AOIMDS_API aoimds_status aoimds_sweep_get_summary(const aoimds_sweep* sweep,
                                                  aoimds_sweep_summary* out);
AOIMDS_API void aoimds_sweep_destroy(aoimds_sweep* sweep);

/* ---- simulation --------------------------------------------------------- */

typedef struct aoimds_simulation aoimds_simulation;

/* Parses a JSON simulation config (schema_version 1), runs it (replications
 * spread over up to `threads` workers) and keeps the report together with
 * the analytical comparison. */
AOIMDS_API aoimds_status aoimds_simulation_run_json(const char* config_json,
                                                    int threads,
                                                    aoimds_simulation** out);
AOIMDS_API int aoimds_simulation_no_delivery(const aoimds_simulation* sim);
AOIMDS_API double aoimds_simulation_max_relative_error(
    const aoimds_simulation* sim);
AOIMDS_API aoimds_status aoimds_simulation_report_json(
    const aoimds_simulation* sim, char** out);
AOIMDS_API aoimds_status aoimds_simulation_report_csv(
    const aoimds_simulation* sim, char** out);
AOIMDS_API void aoimds_simulation_destroy(aoimds_simulation* sim);

/* Shortest round-trip decimal form; "divergent" for +inf, "" for NaN.
 * Returns the number of characters needed (excluding the terminator). */
AOIMDS_API size_t aoimds_format_double(double v, char* buf, size_t len);

#ifdef __cplusplus
}  /* extern "C" */
#endif

#endif  /* AOIMDS_AOIMDS_H_ */
