#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "aoimds/config_io.h"
#include "json.hpp"

namespace aoimds {
namespace {

const char* kBase = R"({"schema_version": 1, "mode": "coded",
  "channel": {"alpha": 0.2, "beta": 0.8, "eps0": 0.2, "eps1": 0.9},
  "system": {"K": 12, "ell": 2, "n": 4, "k": 3}, "rounds": 500, "seed": 9})";

nlohmann::json base() { return nlohmann::json::parse(kBase); }

TEST(FormatDouble, RoundTripsAndSpecialValues) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.125, -2.5, 0.0}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "divergent");
  EXPECT_EQ(format_double(std::nan("")), "");
}

TEST(ParseGe, ReadsAndValidates) {
  const GEParams p = parse_ge_params(R"({"alpha":0.1,"beta":0.2,"eps0":0,"eps1":1})");
  EXPECT_EQ(p.alpha, 0.1);
  EXPECT_EQ(p.eps1, 1.0);
  EXPECT_THROW(parse_ge_params(R"({"alpha":0.1,"beta":0.2,"eps0":0})"),
               std::invalid_argument);
  EXPECT_THROW(parse_ge_params(R"({"alpha":"x","beta":0.2,"eps0":0,"eps1":1})"),
               std::invalid_argument);
  EXPECT_THROW(parse_ge_params("{not json"), std::invalid_argument);
  EXPECT_THROW(parse_ge_params(R"({"alpha":1.5,"beta":0.2,"eps0":0,"eps1":1})"),
               std::invalid_argument);
}

TEST(ParseSimConfig, Defaults) {
  const SimConfigFile f = parse_sim_config(kBase);
  EXPECT_TRUE(f.config.coded);
  EXPECT_EQ(f.config.system.sources(), 12);
  EXPECT_EQ(f.config.system.ell(), 2);
  EXPECT_EQ(f.config.rounds, 500);
  EXPECT_EQ(f.config.seed, 9u);
  EXPECT_EQ(f.replications, 1);
  EXPECT_EQ(f.config.recovery_age_offset, RecoveryAgeOffset::kPaper);
  EXPECT_FALSE(f.config.warmup_rounds.has_value());
}

TEST(ParseSimConfig, OptionalKeys) {
  auto j = base();
  j["mode"] = "uncoded";
  j["system"].erase("n");
  j["system"].erase("k");
  j["warmup_rounds"] = 50;
  j["tracked_sources"] = {3, 7};
  j["recovery_age_offset"] = "geometric";
  j["replications"] = 4;
  const SimConfigFile f = parse_sim_config(j.dump());
  EXPECT_FALSE(f.config.coded);
  EXPECT_EQ(f.config.system.n(), 1);
  EXPECT_EQ(*f.config.warmup_rounds, 50);
  EXPECT_EQ(f.config.tracked_sources, (std::vector<std::int64_t>{3, 7}));
  EXPECT_EQ(f.config.recovery_age_offset, RecoveryAgeOffset::kGeometric);
  EXPECT_EQ(f.replications, 4);
}

TEST(ParseSimConfig, Rejections) {
  const auto rejects = [](const nlohmann::json& j) {
    EXPECT_THROW(parse_sim_config(j.dump()), std::invalid_argument) << j.dump();
  };
  auto j = base();
  j["schema_version"] = 2;
  rejects(j);
  j = base();
  j["mode"] = "hybrid";
  rejects(j);
  j = base();
  j["seed"] = -1;
  rejects(j);
  j = base();
  j["system"]["k"] = 5;
  rejects(j);
  j = base();
  j["rounds"] = 1.5;
  rejects(j);
  j = base();
  j["tracked_sources"] = {12};
  rejects(j);
  j = base();
  j["replications"] = 0;
  rejects(j);
  j = base();
  j["recovery_age_offset"] = "other";
  rejects(j);
  j = base();
  j.erase("channel");
  rejects(j);
  EXPECT_THROW(parse_sim_config("[1,2]"), std::invalid_argument);
}

TEST(Report, JsonAndCsvLayout) {
  const SimConfigFile f = parse_sim_config(kBase);
  const SimReport r = simulate(f.config);
  const SimComparison cmp = compare_with_analysis(f.config, r);
  const auto doc = nlohmann::json::parse(report_to_json(f, r, cmp));
  EXPECT_EQ(doc["schema_version"], 1);
  EXPECT_EQ(doc["command"], "simulate");
  EXPECT_EQ(doc["sources"].size(), 3u);
  EXPECT_EQ(doc["config"]["recovery_age_offset"], "paper");
  EXPECT_EQ(doc["erasure_histogram"].size(), 5u);

  const std::string csv = report_to_csv(r, cmp);
  EXPECT_EQ(csv.rfind("source,position,mean_aoi,ex,ex2,deliveries,predicted_aoi,rel_error\n", 0),
            0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}

TEST(Report, DivergentValuesAreLabelled) {
  auto j = base();
  j["channel"] = {{"alpha", 0.5}, {"beta", 0.5}, {"eps0", 1.0}, {"eps1", 1.0}};
  const SimConfigFile f = parse_sim_config(j.dump());
  const SimReport r = simulate(f.config);
  const auto doc = nlohmann::json::parse(
      report_to_json(f, r, compare_with_analysis(f.config, r)));
  EXPECT_TRUE(doc["no_delivery"].get<bool>());
  EXPECT_EQ(doc["sources"][0]["predicted_aoi"], "divergent");
}

}  // namespace
}  // namespace aoimds
