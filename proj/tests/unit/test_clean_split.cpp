#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>

#include "edbench/clean_split.hpp"
#include "edbench/cohort.hpp"
#include "edbench/common/error.hpp"
#include "edbench/common/random.hpp"
#include "support/fixtures.hpp"

using namespace edbench;
using namespace edbench::clean_split;
namespace t = edbench::testing;

namespace {

NumericTable synthetic_master(std::size_t visits, std::uint64_t seed) {
  const auto cohort = synthdata::generate_cohort(t::synth_config(visits, seed));
  IssueLog log;
  const auto& mapping = comorbidity::MappingTable::shipped();
  const auto& complaints = cohort::ComplaintMatcher::shipped();
  const auto records =
      cohort::build_master(ingest::link_tables(cohort.tables, log), mapping, complaints, {}, log);
  return cohort::to_table(records, mapping, complaints);
}

const Bounds kHr{0, 13, 250, 350};

}  // namespace

TEST(CleanValue, Examples) {
  const Bounds o2{0, 50, 100, 100};
  EXPECT_TRUE(is_missing(clean_value(150, o2)));
  EXPECT_EQ(clean_value(300, kHr), 250.0);
  EXPECT_EQ(clean_value(5, kHr), 13.0);
  EXPECT_EQ(clean_value(80, kHr), 80.0);
  EXPECT_TRUE(is_missing(clean_value(-1, kHr)));
  EXPECT_TRUE(is_missing(clean_value(kMissing, kHr)));
  EXPECT_EQ(clean_value(350, kHr), 250.0);  // outer bounds are inclusive
}

TEST(CleanValue, IdempotentAndMonotonePerVariable) {
  const auto config = CleaningConfig::load(CleaningConfig::default_path());
  Rng rng(12);
  for (const auto& [name, b] : config.variables) {
    const double span = b.outer_high - b.outer_low;
    std::vector<double> xs(20000);
    for (double& x : xs) x = rng.uniform(b.outer_low - 0.5 * span, b.outer_high + 0.5 * span);
    std::sort(xs.begin(), xs.end());
    double last = -INFINITY;
    for (double x : xs) {
      const double c = clean_value(x, b);
      const double cc = clean_value(c, b);
      ASSERT_TRUE((is_missing(c) && is_missing(cc)) || c == cc) << name << " " << x;
      if (!is_missing(c)) {
        ASSERT_GE(c, last) << name;
        last = c;
      }
    }
  }
}

TEST(CleaningConfig, ShippedBoundsOrdered) {
  const auto config = CleaningConfig::load(CleaningConfig::default_path());
  for (const auto& [name, b] : config.variables) {
    EXPECT_LE(b.outer_low, b.inner_low) << name;
    EXPECT_LE(b.inner_low, b.inner_high) << name;
    EXPECT_LE(b.inner_high, b.outer_high) << name;
  }
  EXPECT_TRUE(config.bounds_for("triage_heartrate"));
  EXPECT_TRUE(config.bounds_for("ed_heartrate"));
  EXPECT_TRUE(config.bounds_for("age"));
  EXPECT_FALSE(config.bounds_for("chiefcom_cough"));
  EXPECT_THROW(CleaningConfig::parse(R"({"hr": {"outer": [0, 10], "inner": [5, 20]}})"), Error);
  EXPECT_THROW(CleaningConfig::parse(R"({"hr": {"outer": [0, 10]}})"), Error);
}

TEST(CleanTable, CountsAndPassthrough) {
  NumericTable table({"stay_id", "triage_o2sat", "triage_heartrate"});
  table.add_row({1, 150, 300});
  table.add_row({2, 97, kMissing});
  IssueLog log;
  const auto stats = clean_table(table, CleaningConfig::load(CleaningConfig::default_path()), log);
  EXPECT_EQ(stats.set_missing, 1u);
  EXPECT_EQ(stats.clamped, 1u);
  EXPECT_TRUE(is_missing(table.at(0, 1)));
  EXPECT_EQ(table.at(0, 2), 250.0);
  EXPECT_EQ(table.at(1, 0), 2.0);
}

TEST(Exclusions, MinorsAndMissingAcuity) {
  NumericTable m({"stay_id", "age", "triage_acuity"});
  m.add_row({1, 17, 3});
  m.add_row({2, 40, kMissing});
  m.add_row({3, 18, 2});
  m.add_row({4, 10, kMissing});
  const auto ex = apply_exclusions(m);
  EXPECT_EQ(ex.kept, std::vector<std::size_t>{2});
  EXPECT_EQ(ex.count(ExclusionReason::Minor), 2u);
  EXPECT_EQ(ex.count(ExclusionReason::NoAcuity), 1u);
  EXPECT_EQ(ex.excluded.size(), 3u);
}

TEST(Split, SizesAndDeterminism) {
  std::vector<std::int64_t> ids(10);
  for (int i = 0; i < 10; ++i) ids[i] = 100 + i;
  const auto a = split(ids, 0.2, 3);
  EXPECT_EQ(a.n_test(), 2u);
  EXPECT_EQ(a.n_train(), 8u);
  EXPECT_EQ(split(ids, 0.2, 3), a);
  std::vector<std::int64_t> many(1000);
  for (int i = 0; i < 1000; ++i) many[i] = i;
  EXPECT_NE(split(many, 0.2, 4).by_stay, split(many, 0.2, 3).by_stay);
  for (std::size_t n : {1u, 7u, 13u, 99u, 1001u, 4999u}) {
    std::vector<std::int64_t> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<std::int64_t>(i * 3 + 1);
    EXPECT_EQ(split(v, 0.2, 1).n_test(), static_cast<std::size_t>(std::llround(0.2 * n))) << n;
  }
}

TEST(Split, RowOrderInvariant) {
  Rng rng(6);
  std::vector<std::int64_t> ids(2000);
  for (auto& id : ids) id = static_cast<std::int64_t>(rng.index(1u << 30));
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  const auto reference = split(ids, 0.2, 99);
  std::vector<int> strata(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) strata[i] = static_cast<int>(ids[i] % 3);
  const auto stratified = split(ids, 0.2, 99, &strata);
  std::vector<std::size_t> perm(ids.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  for (int trial = 0; trial < 5; ++trial) {
    rng.shuffle(perm);
    std::vector<std::int64_t> shuffled;
    std::vector<int> shuffled_strata;
    for (auto i : perm) {
      shuffled.push_back(ids[i]);
      shuffled_strata.push_back(strata[i]);
    }
    EXPECT_EQ(split(shuffled, 0.2, 99), reference);
    EXPECT_EQ(split(shuffled, 0.2, 99, &shuffled_strata), stratified);
  }
}

TEST(Split, StratifiedSharesPerStratum) {
  std::vector<std::int64_t> ids;
  std::vector<int> strata;
  for (int i = 0; i < 1000; ++i) {
    ids.push_back(i);
    strata.push_back(i < 100 ? 1 : 0);
  }
  const auto s = split(ids, 0.2, 5, &strata);
  EXPECT_EQ(s.n_test(), 200u);
  std::size_t positives_in_test = 0;
  for (int i = 0; i < 100; ++i) positives_in_test += s.at(i) == Assignment::Test;
  EXPECT_EQ(positives_in_test, 20u);
}

TEST(Split, CsvRoundTrip) {
  t::TempDir dir;
  const auto s = split({5, 9, 2, 40, 41}, 0.4, 17);
  std::ofstream(dir / "split.csv") << s.to_csv();
  EXPECT_EQ(SplitAssignment::read_csv(dir / "split.csv"), s);
  EXPECT_NE(s.to_csv().find("seed"), std::string::npos);
}

TEST(Imputer, MedianExamples) {
  EXPECT_EQ(median({1, 2, 3}), 2.0);
  EXPECT_EQ(median({4, 1, 3, 2}), 2.5);
  NumericTable train({"x"});
  for (double v : {1.0, 2.0, 3.0, kMissing}) train.add_row({v});
  const auto imp = fit_imputer(train, {"x"}, Strategy::Median);
  EXPECT_EQ(imp.fill, std::vector<double>{2.0});
  imp.apply(train);
  EXPECT_EQ(train.at(3, 0), 2.0);
  EXPECT_EQ(train.missing_cells(), 0u);
}

TEST(Imputer, UsesTrainNotTestStatistics) {
  NumericTable train({"hr"}), test({"hr"});
  for (double v : {60.0, 70.0, 80.0}) train.add_row({v});
  for (double v : {150.0, 160.0, kMissing}) test.add_row({v});
  const auto imp = fit_imputer(train, {"hr"}, Strategy::Median);
  imp.apply(test);
  EXPECT_EQ(test.at(2, 0), 70.0);
}

TEST(Imputer, StrategiesAndErrors) {
  NumericTable train({"a", "b"});
  train.add_row({1, kMissing});
  train.add_row({2, kMissing});
  train.add_row({6, kMissing});
  EXPECT_EQ(fit_imputer(train, {"a"}, Strategy::Mean).fill, std::vector<double>{3.0});
  EXPECT_EQ(fit_imputer(train, {"a", "b"}, Strategy::Constant, -1).fill, (std::vector<double>{-1.0, -1.0}));
  try {
    fit_imputer(train, {"a", "b"}, Strategy::Median);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AllMissingColumn);
    EXPECT_NE(std::string(e.what()).find('b'), std::string::npos);
  }
  const auto imp = fit_imputer(train, {"a"}, Strategy::Median);
  EXPECT_EQ(Imputer::from_json(imp.to_json()), imp);
  EXPECT_EQ(parse_strategy("mean"), Strategy::Mean);
  EXPECT_THROW(parse_strategy("mode"), Error);
}

TEST(BuildBenchmark, CompleteAndLeakFree) {
  const auto master = synthetic_master(3000, 3);
  const auto cleaning = CleaningConfig::load(CleaningConfig::default_path());
  IssueLog log;
  BenchmarkOptions o;
  o.seed = 11;
  const auto b = build_benchmark(master, cleaning, o, log);
  const std::size_t kept = b.exclusions.kept.size();
  EXPECT_EQ(b.train.rows() + b.test.rows(), kept);
  EXPECT_EQ(b.test.rows(), static_cast<std::size_t>(std::llround(0.2 * kept)));
  for (const auto* table : {&b.train, &b.test}) {
    for (std::size_t c = 0; c < table->cols(); ++c) {
      if (is_passthrough_column(table->names()[c])) continue;
      for (std::size_t r = 0; r < table->rows(); ++r) ASSERT_FALSE(is_missing(table->at(r, c))) << table->names()[c];
    }
  }

  // Scramble every test row; the fitted imputer and split must not move.
  auto mutated = master;
  Rng rng(1);
  const auto& stay = master.column("stay_id");
  for (std::size_t r = 0; r < mutated.rows(); ++r) {
    const auto id = static_cast<std::int64_t>(stay[r]);
    if (!b.split.by_stay.count(id) || b.split.at(id) != Assignment::Test) continue;
    for (std::size_t c = 0; c < mutated.cols(); ++c) {
      const auto& name = mutated.names()[c];
      if (is_passthrough_column(name) || name == "age" || name == "triage_acuity") continue;
      mutated.column(c)[r] = rng.bernoulli(0.5) ? kMissing : rng.uniform(-1e3, 1e3);
    }
  }
  const auto b2 = build_benchmark(mutated, cleaning, o, log);
  EXPECT_EQ(b2.split, b.split);
  EXPECT_EQ(b2.imputer, b.imputer);
  EXPECT_TRUE(b2.train == b.train);
}
