#ifndef AOIMDS_CONFIG_IO_H_
#define AOIMDS_CONFIG_IO_H_

#include <string>

#include "aoimds/simulator.h"

namespace aoimds {

inline constexpr int kSchemaVersion = 1;

// Shortest decimal string that reads back to the same double. Infinity is
// written as "divergent", NaN as an empty string.
std::string format_double(double v);

// Reads alpha, beta, eps0, eps1 from a JSON object. Throws
// std::invalid_argument on missing keys or wrong types.
GEParams parse_ge_params(const std::string& json_text);

// Simulation config file:
//   {"schema_version": 1, "mode": "coded"|"uncoded",
//    "channel": {alpha, beta, eps0, eps1},
//    "system": {"K", "ell", "n", "k"}, "rounds", "seed",
//    optional "warmup_rounds", "tracked_sources",
//    "recovery_age_offset": "paper"|"geometric", "replications"}
struct SimConfigFile {
  SimConfig config;
  int replications = 1;
};
SimConfigFile parse_sim_config(const std::string& json_text);

// SimReport plus analytical predictions as a JSON document.
std::string report_to_json(const SimConfigFile& cfg, const SimReport& report,
                           const SimComparison& cmp);

// Per-source CSV: source,position,mean_aoi,ex,ex2,deliveries,
// predicted_aoi,rel_error
std::string report_to_csv(const SimReport& report, const SimComparison& cmp);

}  // namespace aoimds

#endif  // AOIMDS_CONFIG_IO_H_
