#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "edbench/common/table.hpp"

namespace edbench::evaluate {

using Scores = std::span<const double>;
using Labels = std::span<const std::uint8_t>;

/// Mann-Whitney form: share of (positive, negative) pairs ranked correctly,
/// ties counted one half. Throws OneClassOnly.
double auroc(Scores scores, Labels labels);

/// Average precision over descending-score groups: sum of recall step times
/// precision after each group of tied scores. Throws NoPositives.
double auprc(Scores scores, Labels labels);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;  // positive iff score >= threshold
};

/// Starts at (0, 0) with an infinite threshold, then one point per distinct
/// score in descending order, ending at (1, 1). Throws OneClassOnly.
std::vector<RocPoint> roc_curve(Scores scores, Labels labels);

/// Threshold of the point closest to (FPR 0, TPR 1); ties go to the lower
/// threshold. The infinite starting threshold is never chosen.
double optimal_cutoff(const std::vector<RocPoint>& curve);

struct SensSpec {
  double sensitivity = 0.0;
  double specificity = 0.0;
};

/// Throws OneClassOnly.
SensSpec sens_spec_at(Scores scores, Labels labels, double threshold);

using Metric = std::function<double(Scores, Labels)>;

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

/// Linear interpolation between order statistics at position p (n - 1).
double percentile(const std::vector<double>& sorted, double p);

/// Percentile bootstrap (2.5, 97.5) over B resamples of (score, label) pairs.
/// Resamples holding one class only are redrawn; more than 10 B draws in total
/// throws ResampleExhausted.
Interval bootstrap_ci(const Metric& metric, Scores scores, Labels labels, int B, std::uint64_t seed,
                      unsigned threads = 1);

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;  // sample SD, 0 for fewer than two values
  std::size_t n = 0;
};

/// Missing values are skipped.
MeanSd mean_sd(const std::vector<double>& values);

struct SummaryTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string to_csv() const;
};

/// One row per variable (one per level for categorical ones): mean (SD) for
/// continuous columns, count (%) of ones for 0/1 columns. Columns are Overall
/// and then, for every stratum outcome, its negative and positive groups.
SummaryTable summarize_cohort(const NumericTable& master, const std::vector<std::string>& strata,
                              const std::vector<std::string>& categorical = {"triage_acuity", "cci_liver_disease",
                                                                             "cci_diabetes", "cci_cancer"});

struct MetricCi {
  double value = 0.0;
  double low = 0.0;
  double high = 0.0;
};

struct ModelResult {
  std::string task;
  std::string model;
  double threshold = 0.0;
  MetricCi auroc;
  MetricCi auprc;
  MetricCi sensitivity;
  MetricCi specificity;
  double runtime_seconds = 0.0;
  int variables = 0;
};

struct EvalOptions {
  int bootstrap = 100;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

/// All metrics for one (task, model) pair. Sensitivity and specificity are
/// taken at the optimal cutoff of the full test set, which stays fixed across
/// resamples. Each interval is widened to include its point estimate.
ModelResult evaluate_model(const std::string& task, const std::string& model, Scores scores, Labels labels,
                           double runtime_seconds, int variables, const EvalOptions& options);

struct EvalReport {
  std::vector<ModelResult> rows;
};

/// Checks every metric against [0, 1] and its interval; keeps row order.
EvalReport build_report(std::vector<ModelResult> results);

enum class ReportFormat { Csv, Json, SvgAuroc, SvgAuprc, RuntimeCsv };

std::string render_report(const EvalReport& report, ReportFormat format);

/// report.csv, report.json, figure_auroc.svg, figure_auprc.svg, runtime.csv.
void write_report(const EvalReport& report, const std::filesystem::path& directory);

/// "0.881 (0.877-0.886)".
std::string format_ci(const MetricCi& m);

/// Three decimals without trailing zeros: 0.445, 0.05, 2.
std::string format_threshold(double threshold);

}  // namespace edbench::evaluate
