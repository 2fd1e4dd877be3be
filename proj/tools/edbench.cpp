// Command-line driver: one subcommand per pipeline stage.
#include <CLI11.hpp>
#include <iostream>

#include "edbench/common/error.hpp"
#include "edbench/pipeline.hpp"

namespace {

using namespace edbench;

const char* category_name(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::Config: return "config error";
    case ErrorCategory::Data: return "data error";
    case ErrorCategory::Integrity: return "integrity error";
  }
  return "error";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Emergency department benchmark pipeline"};
  app.require_subcommand(1);

  std::string config_path;
  unsigned threads = 1;
  std::string time_point;
  std::string task;
  std::string model;
  app.add_option("--config", config_path, "JSON pipeline config; shipped defaults when omitted")
      ->check(CLI::ExistingFile);
  app.add_option("--threads", threads, "Worker threads (1 is fully deterministic)")->check(CLI::PositiveNumber);
  app.add_option("--time-point", time_point, "Feature set for every task: triage or disposition")
      ->check(CLI::IsMember({"triage", "disposition"}));

  auto* synth = app.add_subcommand("synth", "Generate synthetic source tables into input_dir");
  auto* extract = app.add_subcommand("extract-master", "Link source tables into master_dataset.csv");
  auto* bench = app.add_subcommand("build-benchmark", "Exclude, clean, split and impute");
  auto* train = app.add_subcommand("train", "Fit models for each task");
  auto* evaluate = app.add_subcommand("evaluate", "Score models and clinical scores on the test set");
  auto* all = app.add_subcommand("all", "extract-master, build-benchmark, train and evaluate");
  auto* predict = app.add_subcommand("predict", "Apply a saved model to a CSV table");
  for (auto* sub : {train, evaluate, all}) {
    sub->add_option("--task", task, "hospitalization, critical or reattendance (default: all)");
    sub->add_option("--model", model, "LR, RF, GB or MLP (default: all)");
  }
  std::string model_file;
  std::string input_csv;
  std::string output_csv;
  predict->add_option("--model-file", model_file, "Saved model")->required()->check(CLI::ExistingFile);
  predict->add_option("--input", input_csv, "Table with the model's manifest columns")->required();
  predict->add_option("--output", output_csv, "Where to write stay_id,probability")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : exit_code_for(ErrorCategory::Config);
  }

  IssueLog log(&std::cerr);
  try {
    const auto config = config_path.empty() ? pipeline::PipelineConfig() : pipeline::PipelineConfig::load(config_path);
    pipeline::RunOptions options;
    options.threads = threads;
    if (!time_point.empty()) options.time_point = pipeline::parse_time_point(time_point);
    if (!task.empty()) options.task = task;
    if (!model.empty()) options.model = models::parse_model_kind(model);

    pipeline::RunRecord record;
    auto* sub = app.get_subcommands().front();
    record.command = sub->get_name();
    if (sub == synth) {
      pipeline::run_synth(config, record);
    } else if (sub == extract) {
      pipeline::run_extract_master(config, options, log, record);
    } else if (sub == bench) {
      pipeline::run_build_benchmark(config, log, record);
    } else if (sub == train) {
      pipeline::run_train(config, options, log, record);
    } else if (sub == evaluate) {
      pipeline::run_evaluate(config, options, log, record);
    } else if (sub == all) {
      pipeline::run_all(config, options, log, record);
    } else if (sub == predict) {
      pipeline::run_predict(model_file, input_csv, output_csv, record);
    }
    pipeline::write_run_manifest(config, options, log, record);
    std::cerr << "INFO [" << record.command << "] done\n";
    return 0;
  } catch (const Error& e) {
    std::cerr << "ERROR [" << to_string(e.code()) << "] " << category_name(e.category()) << ": " << e.message()
              << "\n";
    return exit_code_for(e.category());
  } catch (const std::exception& e) {
    std::cerr << "ERROR [Internal] " << e.what() << "\n";
    return 1;
  }
}
