#include "aoimds/config_io.h"

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace aoimds {

namespace {

using nlohmann::json;

json number_or_divergent(double v) {
  if (std::isfinite(v)) return v;
  if (std::isinf(v)) return "divergent";
  return nullptr;
}

template <typename T>
T required(const json& obj, const char* key) {
  if (!obj.contains(key)) {
    throw std::invalid_argument(std::string("missing key \"") + key + "\"");
  }
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw std::invalid_argument(std::string("key \"") + key +
                                "\" has the wrong type");
  }
}

std::int64_t required_integer(const json& obj, const char* key) {
  if (!obj.contains(key) || !obj.at(key).is_number_integer()) {
    throw std::invalid_argument(std::string("key \"") + key +
                                "\" must be an integer");
  }
  return obj.at(key).get<std::int64_t>();
}

GEParams ge_from(const json& obj) {
  if (!obj.is_object()) throw std::invalid_argument("channel must be a JSON object");
  GEParams p{required<double>(obj, "alpha"), required<double>(obj, "beta"),
             required<double>(obj, "eps0"), required<double>(obj, "eps1")};
  p.validate();
  return p;
}

json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("malformed JSON: ") + e.what());
  }
}

json ge_to_json(const GEParams& p) {
  return {{"alpha", p.alpha}, {"beta", p.beta}, {"eps0", p.eps0}, {"eps1", p.eps1}};
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return "divergent";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

GEParams parse_ge_params(const std::string& json_text) {
  return ge_from(parse_text(json_text));
}

SimConfigFile parse_sim_config(const std::string& json_text) {
  const json j = parse_text(json_text);
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  if (required_integer(j, "schema_version") != kSchemaVersion) {
    throw std::invalid_argument("unsupported schema_version (expected 1)");
  }

  SimConfigFile out;
  SimConfig& cfg = out.config;
  const std::string mode = j.value("mode", std::string("coded"));
  if (mode != "coded" && mode != "uncoded") {
    throw std::invalid_argument("mode must be \"coded\" or \"uncoded\"");
  }
  cfg.coded = mode == "coded";
  cfg.channel = ge_from(required<json>(j, "channel"));

  const json sys = required<json>(j, "system");
  if (!sys.is_object()) throw std::invalid_argument("system must be a JSON object");
  const std::int64_t sources = required_integer(sys, "K");
  const std::int64_t ell = sys.contains("ell") ? required_integer(sys, "ell") : 1;
  if (cfg.coded) {
    const std::int64_t n = required_integer(sys, "n");
    const std::int64_t k = required_integer(sys, "k");
    if (n < 1 || n > 1'000'000 || k < 1 || k > n) {
      throw std::invalid_argument("code parameters must satisfy 1 <= k <= n");
    }
    cfg.system = SystemConfig::create(sources, ell, static_cast<int>(n),
                                      static_cast<int>(k));
  } else {
    cfg.system = SystemConfig::uncoded(sources, ell);
  }

  cfg.rounds = required_integer(j, "rounds");
  if (j.contains("warmup_rounds")) cfg.warmup_rounds = required_integer(j, "warmup_rounds");
  if (!j.contains("seed") || !j.at("seed").is_number_unsigned()) {
    throw std::invalid_argument("key \"seed\" must be a non-negative integer");
  }
  cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("tracked_sources")) {
    const json& ts = j.at("tracked_sources");
    if (!ts.is_array()) throw std::invalid_argument("tracked_sources must be an array");
    for (const json& v : ts) {
      if (!v.is_number_integer()) {
        throw std::invalid_argument("tracked_sources entries must be integers");
      }
      cfg.tracked_sources.push_back(v.get<std::int64_t>());
    }
  }
  const std::string offset = j.value("recovery_age_offset", std::string("paper"));
  if (offset == "paper") {
    cfg.recovery_age_offset = RecoveryAgeOffset::kPaper;
  } else if (offset == "geometric") {
    cfg.recovery_age_offset = RecoveryAgeOffset::kGeometric;
  } else {
    throw std::invalid_argument(
        "recovery_age_offset must be \"paper\" or \"geometric\"");
  }
  if (j.contains("replications")) {
    const std::int64_t r = required_integer(j, "replications");
    if (r < 1 || r > 1'000'000) throw std::invalid_argument("replications must be >= 1");
    out.replications = static_cast<int>(r);
  }
  cfg.validate();
  return out;
}

std::string report_to_json(const SimConfigFile& file, const SimReport& report,
                           const SimComparison& cmp) {
  const SimConfig& cfg = file.config;
  json config = {
      {"mode", cfg.coded ? "coded" : "uncoded"},
      {"channel", ge_to_json(cfg.channel)},
      {"system",
       {{"K", cfg.system.sources()},
        {"ell", cfg.system.ell()},
        {"n", cfg.system.n()},
        {"k", cfg.system.k()}}},
      {"rounds", cfg.rounds},
      {"warmup_rounds", cfg.effective_warmup()},
      {"recovery_age_offset",
       cfg.recovery_age_offset == RecoveryAgeOffset::kPaper ? "paper" : "geometric"},
      {"replications", file.replications}};

  const auto event = [&](std::int64_t count, double freq, double se,
                         double predicted, double z) {
    return json{{"count", count},
                {"frequency", freq},
                {"se", se},
                {"predicted", number_or_divergent(predicted)},
                {"z", number_or_divergent(z)}};
  };

  json sources = json::array();
  for (std::size_t i = 0; i < report.sources.size(); ++i) {
    const SourceStats& st = report.sources[i];
    const SourceComparison& c = cmp.sources[i];
    sources.push_back({{"source", st.source},
                       {"position", st.position},
                       {"deliveries", st.deliveries},
                       {"recoveries", st.recoveries},
                       {"mean_aoi", number_or_divergent(c.empirical_aoi)},
                       {"predicted_aoi", number_or_divergent(c.predicted_aoi)},
                       {"relative_error", number_or_divergent(c.relative_error)},
                       {"ex", number_or_divergent(c.empirical_x)},
                       {"ex_predicted", number_or_divergent(c.predicted_x)},
                       {"ex_se", c.se_x},
                       {"ex2", number_or_divergent(c.empirical_x2)},
                       {"ex2_predicted", number_or_divergent(c.predicted_x2)},
                       {"ex2_se", c.se_x2}});
  }

  json doc = {
      {"schema_version", kSchemaVersion},
      {"command", "simulate"},
      {"seed", report.seed},
      {"config", config},
      {"block_length", report.block_length},
      {"blocks", report.blocks},
      {"blocks_total", report.blocks_total},
      {"no_delivery", report.no_delivery},
      {"events",
       {{"a", event(report.events.a, report.freq_a(), report.se_a(),
                    cmp.predicted_events.p_a, cmp.z_a)},
        {"b", event(report.events.b, report.freq_b(), report.se_b(),
                    cmp.predicted_events.p_b, cmp.z_b)},
        {"c", event(report.events.c, report.freq_c(), report.se_c(),
                    cmp.predicted_events.p_c, cmp.z_c)}}},
      {"erasure_histogram", report.erasure_histogram},
      {"sources", sources},
      {"max_relative_error", number_or_divergent(cmp.max_relative_error)}};
  return doc.dump(2) + "\n";
}

std::string report_to_csv(const SimReport& report, const SimComparison& cmp) {
  std::ostringstream os;
  os << "source,position,mean_aoi,ex,ex2,deliveries,predicted_aoi,rel_error\n";
  for (std::size_t i = 0; i < report.sources.size(); ++i) {
    const SourceStats& st = report.sources[i];
    const SourceComparison& c = cmp.sources[i];
    os << st.source << ',' << st.position << ',' << format_double(c.empirical_aoi)
       << ',' << format_double(c.empirical_x) << ','
       << format_double(c.empirical_x2) << ',' << st.deliveries << ','
       << format_double(c.predicted_aoi) << ','
       << format_double(c.relative_error) << '\n';
  }
  return os.str();
}

}  // namespace aoimds
