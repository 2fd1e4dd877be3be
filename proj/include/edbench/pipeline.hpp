#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "edbench/clean_split.hpp"
#include "edbench/common/log.hpp"
#include "edbench/models.hpp"
#include "edbench/synthdata.hpp"

namespace edbench::pipeline {

enum class TimePoint { Triage, Disposition };

std::string_view to_string(TimePoint t);
TimePoint parse_time_point(std::string_view text);

struct Task {
  std::string name;
  std::string label;  // master column
  TimePoint time_point;
};

/// hospitalization and critical at triage, reattendance at disposition.
const std::vector<Task>& benchmark_tasks();
const Task& find_task(std::string_view name);

/// Run settings. Relative paths in a config file resolve against the file's
/// directory.
struct PipelineConfig {
  std::filesystem::path input_dir = "data/raw";
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 0;
  double test_fraction = 0.2;
  int lookback_years = 5;
  clean_split::Strategy imputation = clean_split::Strategy::Median;
  bool stratify = false;
  std::filesystem::path cleaning_config;
  std::vector<std::filesystem::path> score_paths;
  std::filesystem::path triage_manifest;
  std::filesystem::path disposition_manifest;
  models::Hyperparameters hyperparameters;
  int bootstrap = 100;
  std::vector<std::string> tasks;     // empty: all
  std::vector<models::ModelKind> models = {models::ModelKind::LR, models::ModelKind::RF, models::ModelKind::GB,
                                           models::ModelKind::MLP};
  synthdata::SynthConfig synth;

  /// Shipped defaults for every path left empty.
  PipelineConfig();

  static PipelineConfig parse(std::string_view json_text, const std::filesystem::path& base_dir = {});
  static PipelineConfig load(const std::filesystem::path& path);

  /// Stable serialization, the input of the run manifest's config hash.
  std::string canonical_json() const;
};

struct RunOptions {
  unsigned threads = 1;
  std::optional<TimePoint> time_point;  // overrides each task's own
  std::optional<std::string> task;
  std::optional<models::ModelKind> model;
};

/// Row counts and output hashes gathered by one command.
struct RunRecord {
  std::string command;
  std::map<std::string, std::size_t> row_counts;
  std::map<std::string, std::string> outputs;  // file name -> FNV-1a hex
};

// Output file names under output_dir.
inline constexpr const char* kMasterFile = "master_dataset.csv";
inline constexpr const char* kTrainFile = "train.csv";
inline constexpr const char* kTestFile = "test.csv";
inline constexpr const char* kSplitFile = "split.csv";
inline constexpr const char* kImputerFile = "imputer.json";
inline constexpr const char* kModelDir = "models";
inline constexpr const char* kTimingsFile = "timings.json";

std::filesystem::path model_path(const PipelineConfig& config, const Task& task, TimePoint time_point,
                                 models::ModelKind kind);

void run_synth(const PipelineConfig& config, RunRecord& record);
void run_extract_master(const PipelineConfig& config, const RunOptions& options, IssueLog& log, RunRecord& record);
void run_build_benchmark(const PipelineConfig& config, IssueLog& log, RunRecord& record);
void run_train(const PipelineConfig& config, const RunOptions& options, IssueLog& log, RunRecord& record);
void run_evaluate(const PipelineConfig& config, const RunOptions& options, IssueLog& log, RunRecord& record);
/// extract-master, build-benchmark, train, evaluate.
void run_all(const PipelineConfig& config, const RunOptions& options, IssueLog& log, RunRecord& record);

/// Probabilities for every row of a CSV table, written as stay_id,probability.
void run_predict(const std::filesystem::path& model_file, const std::filesystem::path& table_csv,
                 const std::filesystem::path& out_csv, RunRecord& record);

/// run_manifest_<command>.json in the output directory.
void write_run_manifest(const PipelineConfig& config, const RunOptions& options, const IssueLog& log,
                        const RunRecord& record);

std::string fnv1a_hex(std::string_view bytes);

}  // namespace edbench::pipeline
