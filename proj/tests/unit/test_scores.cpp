#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <map>

#include "edbench/common/error.hpp"
#include "edbench/common/random.hpp"
#include "edbench/scores.hpp"
#include "support/oracles.hpp"

using namespace edbench;
using namespace edbench::scores;
namespace charts = edbench::testing::charts;

namespace {

const ScoreDefinition& shipped(const std::string& name) {
  static const auto defs = load_scores(shipped_score_paths());
  for (const auto& d : defs) {
    if (d.name == name) return d;
  }
  throw std::runtime_error("no score " + name);
}

const Component& component(const ScoreDefinition& d, const std::string& variable) {
  for (const auto& c : d.components) {
    if (c.variable == variable) return c;
  }
  throw std::runtime_error("no component " + variable);
}

// Value grid in the charts' own resolution: whole units, tenths for temperature.
std::vector<double> grid(const std::string& variable) {
  std::vector<double> g;
  if (variable == "temperature") {
    for (int k = 250; k <= 450; ++k) g.push_back(k / 10.0);
  } else {
    const int hi = variable == "age" ? 120 : variable == "o2sat" ? 100 : 375;
    for (int k = 0; k <= hi; ++k) g.push_back(k);
  }
  return g;
}

using Chart = std::map<std::string, std::function<int(double)>>;

const std::map<std::string, Chart>& chart_table() {
  static const std::map<std::string, Chart> t = {
      {"NEWS",
       {{"resprate", charts::news_resprate},
        {"o2sat", charts::news_o2sat},
        {"temperature", charts::news_temperature},
        {"sbp", charts::news_sbp},
        {"heartrate", charts::news_heartrate}}},
      {"NEWS2",
       {{"resprate", charts::news_resprate},
        {"o2sat", charts::news_o2sat},
        {"temperature", charts::news_temperature},
        {"sbp", charts::news_sbp},
        {"heartrate", charts::news_heartrate}}},
      {"MEWS",
       {{"sbp", charts::mews_sbp},
        {"heartrate", charts::mews_heartrate},
        {"resprate", charts::mews_resprate},
        {"temperature", charts::mews_temperature}}},
      {"REMS",
       {{"age", charts::rems_age},
        {"map", charts::rems_map},
        {"heartrate", charts::rems_heartrate},
        {"resprate", charts::rems_resprate},
        {"o2sat", charts::rems_o2sat}}},
      {"CART",
       {{"resprate", charts::cart_resprate},
        {"heartrate", charts::cart_heartrate},
        {"dbp", charts::cart_dbp},
        {"age", charts::cart_age}}},
  };
  return t;
}

NumericTable one_row(double age, double temp, double hr, double rr, double o2, double sbp, double dbp) {
  NumericTable t({"age", "triage_temperature", "triage_heartrate", "triage_resprate", "triage_o2sat", "triage_sbp",
                  "triage_dbp"});
  t.add_row({age, temp, hr, rr, o2, sbp, dbp});
  return t;
}

}  // namespace

TEST(ScoreTables, GoldenGrids) {
  for (const auto& [name, chart] : chart_table()) {
    const auto& def = shipped(name);
    EXPECT_EQ(def.components.size(), chart.size()) << name;
    for (const auto& [variable, oracle] : chart) {
      const auto& comp = component(def, variable);
      std::size_t mismatches = 0;
      for (double v : grid(variable)) {
        if (band_points(v, comp) != oracle(v)) {
          ++mismatches;
          ADD_FAILURE() << name << " " << variable << " at " << v << ": table " << band_points(v, comp) << ", chart "
                        << oracle(v);
        }
      }
      EXPECT_EQ(mismatches, 0u);
    }
  }
}

TEST(ScoreTables, BandBoundaries) {
  const auto& hr = component(shipped("NEWS"), "heartrate");
  EXPECT_EQ(band_points(95, hr), 1);
  EXPECT_EQ(band_points(70, hr), 0);
  EXPECT_EQ(band_points(90, hr), 0);
  EXPECT_EQ(band_points(91, hr), 1);
}

TEST(ScoreTables, ShapeOfShippedDefinitions) {
  for (const auto& name : {"NEWS", "NEWS2", "MEWS", "REMS", "CART"}) {
    const auto& def = shipped(name);
    int bound = 0;
    for (const auto& c : def.components) {
      ASSERT_FALSE(c.bands.empty());
      EXPECT_TRUE(std::isinf(c.bands.front().low)) << name << " " << c.name;
      EXPECT_TRUE(std::isinf(c.bands.back().high)) << name << " " << c.name;
      for (std::size_t i = 0; i < c.bands.size(); ++i) {
        EXPECT_GE(c.bands[i].points, 0);
        if (i > 0) EXPECT_EQ(c.bands[i].low, c.bands[i - 1].high);
      }
      bound += c.max_points();
    }
    EXPECT_EQ(def.max_total(), bound);
  }
}

TEST(ScoreTables, VariableCounts) {
  for (const auto& name : {"NEWS", "NEWS2", "MEWS", "REMS"}) EXPECT_EQ(shipped(name).inputs.size(), 6u) << name;
  EXPECT_EQ(shipped("CART").inputs.size(), 4u);
}

TEST(ScoreTables, NewsHeartRateIsUShaped) {
  const auto& bands = component(shipped("NEWS"), "heartrate").bands;
  std::size_t zero = 0;
  while (bands[zero].points != 0) ++zero;
  for (std::size_t i = 1; i <= zero; ++i) EXPECT_LE(bands[i].points, bands[i - 1].points);
  for (std::size_t i = zero + 1; i < bands.size(); ++i) EXPECT_GE(bands[i].points, bands[i - 1].points);
}

TEST(ComputeScore, Examples) {
  const auto normal = one_row(30, 37.0, 70, 14, 98, 120, 80);
  EXPECT_EQ(compute_score(shipped("NEWS"), normal, 0, VitalsSource::Triage), 0.0);
  EXPECT_EQ(compute_score(shipped("NEWS2"), normal, 0, VitalsSource::Triage), 0.0);
  EXPECT_EQ(compute_score(shipped("REMS"), normal, 0, VitalsSource::Triage), 0.0);
  EXPECT_EQ(band_points(30, component(shipped("REMS"), "age")), 0);

  // MEWS systolic 78 sits in the 71-80 band: 2 points. The chart's top SBP
  // band (<= 70) is worth 3.
  const auto& sbp = component(shipped("MEWS"), "sbp");
  EXPECT_EQ(band_points(78, sbp), 2);
  EXPECT_EQ(sbp.max_points(), 3);
  const auto low_bp = one_row(30, 37.0, 70, 14, 98, 78, 50);
  EXPECT_EQ(compute_score(shipped("MEWS"), low_bp, 0, VitalsSource::Triage), 2.0);

  // Hand total: NEWS with RR 26 (3), SpO2 93 (2), T 38.5 (1), SBP 95 (2), HR 115 (2).
  const auto sick = one_row(70, 38.5, 115, 26, 93, 95, 60);
  EXPECT_EQ(compute_score(shipped("NEWS"), sick, 0, VitalsSource::Triage), 10.0);
  // CART: RR 26 (15), HR 115 (4), DBP 60 (0), age 70 (9).
  EXPECT_EQ(compute_score(shipped("CART"), sick, 0, VitalsSource::Triage), 28.0);
  // REMS: age 70 (5), MAP 71.7 (0), HR 115 (2), RR 26 (1), SpO2 93 (0).
  EXPECT_EQ(compute_score(shipped("REMS"), sick, 0, VitalsSource::Triage), 8.0);
}

TEST(ComputeScore, MissingInputGivesMissingTotal) {
  const auto row = one_row(30, kMissing, 70, 14, 98, 120, 80);
  EXPECT_TRUE(is_missing(compute_score(shipped("NEWS"), row, 0, VitalsSource::Triage)));
  EXPECT_FALSE(is_missing(compute_score(shipped("CART"), row, 0, VitalsSource::Triage)));
}

TEST(ComputeScore, VitalsSourceSelectsColumns) {
  NumericTable t({"age", "triage_heartrate", "triage_resprate", "triage_dbp", "ed_heartrate", "ed_resprate", "ed_dbp"});
  t.add_row({40, 80, 14, 70, 150, 31, 30});
  EXPECT_EQ(compute_score(shipped("CART"), t, 0, VitalsSource::Triage), 0.0);
  EXPECT_EQ(compute_score(shipped("CART"), t, 0, VitalsSource::Ed), 13.0 + 22.0 + 13.0);
}

TEST(ComputeScore, BoundedDeterministicIntegers) {
  Rng rng(8);
  NumericTable t({"age", "triage_temperature", "triage_heartrate", "triage_resprate", "triage_o2sat", "triage_sbp",
                  "triage_dbp"});
  for (int i = 0; i < 5000; ++i) {
    t.add_row({rng.uniform(18, 100), rng.uniform(30, 42), rng.uniform(13, 250), rng.uniform(4, 60),
               rng.uniform(50, 100), rng.uniform(50, 250), rng.uniform(20, 180)});
  }
  for (const auto& name : {"NEWS", "NEWS2", "MEWS", "REMS", "CART"}) {
    const auto& def = shipped(name);
    const auto s = compute_scores(def, t, VitalsSource::Triage);
    ASSERT_EQ(s, compute_scores(def, t, VitalsSource::Triage));
    for (double v : s) {
      ASSERT_GE(v, 0.0);
      ASSERT_LE(v, def.max_total());
      ASSERT_EQ(v, std::floor(v));
    }
  }
}

TEST(ComputeScore, MeanArterialPressure) {
  EXPECT_DOUBLE_EQ(mean_arterial_pressure(120, 90), 100.0);
  const auto& map = component(shipped("REMS"), "map");
  // SBP 190 / DBP 145 gives MAP 160, the top band.
  const auto row = one_row(30, 37.0, 80, 14, 98, 190, 145);
  EXPECT_EQ(compute_score(shipped("REMS"), row, 0, VitalsSource::Triage), band_points(160, map));
  EXPECT_EQ(band_points(160, map), 4);
}

TEST(BandPoints, NoBand) {
  Component c{"x", "heartrate", {{0, 10, 1}, {10, 20, 2}}};
  EXPECT_EQ(band_points(0, c), 1);
  EXPECT_EQ(band_points(10, c), 2);
  try {
    band_points(20, c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoBand);
  }
}

TEST(ScoreDefinition, ParseRejectsGapsAndNegativePoints) {
  EXPECT_NO_THROW(ScoreDefinition::parse(
      R"({"name": "T", "inputs": ["heartrate"], "components": [{"name": "hr", "variable": "heartrate", "bands": [[null, 5, 1], [5, null, 0]]}]})"));
  EXPECT_THROW(ScoreDefinition::parse(
                   R"({"name": "T", "inputs": [], "components": [{"name": "hr", "variable": "heartrate", "bands": [[null, 5, 1], [6, null, 0]]}]})"),
               Error);
  EXPECT_THROW(ScoreDefinition::parse(
                   R"({"name": "T", "inputs": [], "components": [{"name": "hr", "variable": "heartrate", "bands": [[null, null, -1]]}]})"),
               Error);
}

TEST(EsiRisk, Ordering) {
  EXPECT_EQ(esi_risk(1), 5);
  EXPECT_EQ(esi_risk(5), 1);
  EXPECT_EQ(esi_risk(2), 4);
  for (double bad : {0.0, 6.0, 2.5, kMissing}) {
    try {
      esi_risk(bad);
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::BadAcuity);
    }
  }
}
