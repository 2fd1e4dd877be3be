#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "edbench/common/log.hpp"
#include "edbench/common/table.hpp"

namespace edbench::clean_split {

/// Values outside [outer_low, outer_high] are outliers and become missing;
/// values between the outer and inner bounds are clamped to the inner range.
struct Bounds {
  double outer_low = 0.0;
  double inner_low = 0.0;
  double inner_high = 0.0;
  double outer_high = 0.0;

  friend bool operator==(const Bounds&, const Bounds&) = default;
};

/// Physiological ranges per variable, loaded from JSON:
///
///     {"heartrate": {"outer": [0, 350], "inner": [13, 250]}, ...}
///
/// A key applies to the column of that name and to every column ending in
/// `_<key>`, so "heartrate" covers triage_heartrate and ed_heartrate.
struct CleaningConfig {
  std::map<std::string, Bounds> variables;

  static CleaningConfig parse(std::string_view json_text);
  static CleaningConfig load(const std::filesystem::path& path);
  static std::filesystem::path default_path();

  /// Bounds for a table column, if any key covers it.
  std::optional<Bounds> bounds_for(std::string_view column) const;
};

/// Missing input stays missing.
double clean_value(double value, const Bounds& bounds);

struct CleaningStats {
  std::size_t set_missing = 0;
  std::size_t clamped = 0;
};

/// Cleans every covered column of `table` in place.
CleaningStats clean_table(NumericTable& table, const CleaningConfig& config, IssueLog& log);

enum class ExclusionReason { Minor, NoAcuity };

std::string_view to_string(ExclusionReason reason);

struct Exclusions {
  std::vector<std::size_t> kept;  // row indices into the master table
  std::vector<std::pair<std::size_t, ExclusionReason>> excluded;

  std::size_t count(ExclusionReason reason) const;
};

/// Keeps adult visits (age >= 18) with a recorded triage acuity. A visit
/// failing both rules is reported once, as a minor.
Exclusions apply_exclusions(const NumericTable& master, int min_age = 18);

enum class Assignment { Train, Test };

struct SplitAssignment {
  std::uint64_t seed = 0;
  double test_fraction = 0.2;
  std::map<std::int64_t, Assignment> by_stay;

  std::size_t n_test() const;
  std::size_t n_train() const { return by_stay.size() - n_test(); }
  Assignment at(std::int64_t stay_id) const;

  /// `stay_id,assignment` rows with the seed and fraction in a `#` comment.
  std::string to_csv() const;
  static SplitAssignment read_csv(const std::filesystem::path& path);

  friend bool operator==(const SplitAssignment&, const SplitAssignment&) = default;
};

/// Episode-level random split. Stay ids are sorted first, then shuffled by a
/// seeded Fisher-Yates pass; the first round(test_fraction * N) go to test.
/// With `strata`, each stratum (parallel to stay_ids) gets its share of the
/// test set by largest remainder and is shuffled on its own.
SplitAssignment split(const std::vector<std::int64_t>& stay_ids, double test_fraction,
                      std::uint64_t seed, const std::vector<int>* strata = nullptr);

enum class Strategy { Median, Mean, Constant };

Strategy parse_strategy(std::string_view text);
std::string_view to_string(Strategy strategy);

struct Imputer {
  Strategy strategy = Strategy::Median;
  std::vector<std::string> columns;
  std::vector<double> fill;

  /// Fills every missing cell of the fitted columns.
  void apply(NumericTable& table) const;

  std::string to_json() const;
  static Imputer from_json(std::string_view text);

  friend bool operator==(const Imputer&, const Imputer&) = default;
};

/// Even-count medians average the two middle values. Throws AllMissingColumn
/// when a column has no observed value (median/mean only).
Imputer fit_imputer(const NumericTable& train, const std::vector<std::string>& columns,
                    Strategy strategy, double constant = 0.0);

double median(std::vector<double> values);

/// Identifier and outcome columns, which are never cleaned or imputed.
bool is_passthrough_column(std::string_view name);

struct BenchmarkOptions {
  double test_fraction = 0.2;
  std::uint64_t seed = 0;
  bool stratify = false;
  std::string stratify_on = "outcome_hospitalization";
  Strategy strategy = Strategy::Median;
  double constant = 0.0;
  int min_age = 18;
};

struct Benchmark {
  NumericTable train;
  NumericTable test;
  SplitAssignment split;
  Imputer imputer;
  Exclusions exclusions;
  CleaningStats cleaning;
};

/// Exclusions, outlier cleaning, split, and imputation fitted on train only.
Benchmark build_benchmark(const NumericTable& master, const CleaningConfig& cleaning,
                          const BenchmarkOptions& options, IssueLog& log);

}  // namespace edbench::clean_split
