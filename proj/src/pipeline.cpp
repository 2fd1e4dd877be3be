#include "edbench/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <json.hpp>

#include "edbench/cohort.hpp"
#include "edbench/common/csv.hpp"
#include "edbench/common/error.hpp"
#include "edbench/common/random.hpp"
#include "edbench/comorbidity.hpp"
#include "edbench/evaluate.hpp"
#include "edbench/ingest.hpp"
#include "edbench/scores.hpp"

namespace edbench::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "edbench 1.0.0";

const std::vector<std::string> kSummaryStrata = {"outcome_hospitalization", "outcome_critical",
                                                 "outcome_ed_revisit_3d"};

fs::path data_path(const char* rel) { return fs::path(EDBENCH_DATA_DIR) / rel; }

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_relative() && !base.empty() ? base / path : path;
}

void write_output(const fs::path& path, std::string_view contents, RunRecord& record) {
  fs::create_directories(path.parent_path());
  csv::write_text_file(path, contents);
  record.outputs[path.filename().string()] = fnv1a_hex(contents);
}

void write_output(const fs::path& path, std::string_view contents, RunRecord& record, const std::string& key) {
  fs::create_directories(path.parent_path());
  csv::write_text_file(path, contents);
  record.outputs[key] = fnv1a_hex(contents);
}

void require_file(const fs::path& path, const char* what) {
  if (!fs::exists(path)) {
    throw Error(ErrorCode::MissingFile, std::string(what) + " not found: " + path.string() +
                                            " (run the earlier stage first)");
  }
}

std::vector<const Task*> selected_tasks(const PipelineConfig& config, const RunOptions& options) {
  std::vector<const Task*> out;
  if (options.task) {
    out.push_back(&find_task(*options.task));
  } else if (!config.tasks.empty()) {
    for (const auto& t : config.tasks) out.push_back(&find_task(t));
  } else {
    for (const auto& t : benchmark_tasks()) out.push_back(&t);
  }
  return out;
}

std::vector<models::ModelKind> selected_models(const PipelineConfig& config, const RunOptions& options) {
  if (options.model) return {*options.model};
  return config.models;
}

TimePoint time_point_for(const Task& task, const RunOptions& options) {
  return options.time_point.value_or(task.time_point);
}

const fs::path& manifest_for(const PipelineConfig& config, TimePoint t) {
  return t == TimePoint::Triage ? config.triage_manifest : config.disposition_manifest;
}

std::string task_label(const Task& task, TimePoint t) { return task.name + "@" + std::string(to_string(t)); }

json read_timings(const fs::path& path) {
  if (!fs::exists(path)) return json::object();
  try {
    return json::parse(csv::read_text_file(path));
  } catch (const json::exception&) {
    return json::object();
  }
}

}  // namespace

std::string_view to_string(TimePoint t) { return t == TimePoint::Triage ? "triage" : "disposition"; }

TimePoint parse_time_point(std::string_view text) {
  if (text == "triage") return TimePoint::Triage;
  if (text == "disposition") return TimePoint::Disposition;
  throw Error(ErrorCode::BadConfig, "time point must be triage or disposition, got '" + std::string(text) + "'");
}

const std::vector<Task>& benchmark_tasks() {
  static const std::vector<Task> tasks = {
      {"hospitalization", "outcome_hospitalization", TimePoint::Triage},
      {"critical", "outcome_critical", TimePoint::Triage},
      {"reattendance", "outcome_ed_revisit_3d", TimePoint::Disposition},
  };
  return tasks;
}

const Task& find_task(std::string_view name) {
  for (const auto& t : benchmark_tasks()) {
    if (t.name == name) return t;
  }
  throw Error(ErrorCode::BadConfig,
              "unknown task '" + std::string(name) + "' (expected hospitalization, critical or reattendance)");
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

PipelineConfig::PipelineConfig()
    : cleaning_config(clean_split::CleaningConfig::default_path()),
      score_paths(scores::shipped_score_paths()),
      triage_manifest(data_path("manifests/triage.txt")),
      disposition_manifest(data_path("manifests/disposition.txt")) {}

PipelineConfig PipelineConfig::parse(std::string_view json_text, const fs::path& base_dir) {
  PipelineConfig c;
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadConfig, std::string("config: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::BadConfig, "config must be a JSON object");
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "input_dir") {
        c.input_dir = resolve(base_dir, value.get<std::string>());
      } else if (key == "output_dir") {
        c.output_dir = resolve(base_dir, value.get<std::string>());
      } else if (key == "seed") {
        if (!value.is_number_integer() || value.get<long long>() < 0) {
          throw Error(ErrorCode::BadConfig, "seed must be a non-negative integer");
        }
        c.seed = value.get<std::uint64_t>();
      } else if (key == "test_fraction") {
        c.test_fraction = value.get<double>();
      } else if (key == "lookback_years") {
        c.lookback_years = value.get<int>();
      } else if (key == "imputation") {
        c.imputation = clean_split::parse_strategy(value.get<std::string>());
      } else if (key == "stratify") {
        c.stratify = value.get<bool>();
      } else if (key == "cleaning_config") {
        c.cleaning_config = resolve(base_dir, value.get<std::string>());
      } else if (key == "score_paths") {
        c.score_paths.clear();
        for (const auto& p : value) c.score_paths.push_back(resolve(base_dir, p.get<std::string>()));
      } else if (key == "triage_manifest") {
        c.triage_manifest = resolve(base_dir, value.get<std::string>());
      } else if (key == "disposition_manifest") {
        c.disposition_manifest = resolve(base_dir, value.get<std::string>());
      } else if (key == "hyperparameters") {
        c.hyperparameters = models::parse_hyperparameters(value.dump());
      } else if (key == "bootstrap") {
        c.bootstrap = value.get<int>();
      } else if (key == "tasks") {
        c.tasks = value.get<std::vector<std::string>>();
        for (const auto& t : c.tasks) find_task(t);
      } else if (key == "models") {
        c.models.clear();
        for (const auto& m : value) c.models.push_back(models::parse_model_kind(m.get<std::string>()));
      } else if (key == "synth") {
        c.synth = synthdata::parse_config(value.dump());
      } else {
        throw Error(ErrorCode::BadConfig, "unknown config key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadConfig, std::string("config: ") + e.what());
  }
  if (!(c.test_fraction > 0.0 && c.test_fraction < 1.0)) {
    throw Error(ErrorCode::BadConfig, "test_fraction must lie in (0, 1)");
  }
  if (c.lookback_years < 0) throw Error(ErrorCode::BadConfig, "lookback_years must be non-negative");
  if (c.bootstrap < 1) throw Error(ErrorCode::BadConfig, "bootstrap must be at least 1");
  return c;
}

PipelineConfig PipelineConfig::load(const fs::path& path) {
  if (!fs::exists(path)) throw Error(ErrorCode::MissingFile, "config file not found: " + path.string());
  return parse(csv::read_text_file(path), fs::absolute(path).parent_path());
}

std::string PipelineConfig::canonical_json() const {
  json doc;
  doc["input_dir"] = input_dir.generic_string();
  doc["output_dir"] = output_dir.generic_string();
  doc["seed"] = seed;
  doc["test_fraction"] = test_fraction;
  doc["lookback_years"] = lookback_years;
  doc["imputation"] = clean_split::to_string(imputation);
  doc["stratify"] = stratify;
  doc["cleaning_config"] = cleaning_config.generic_string();
  json paths = json::array();
  for (const auto& p : score_paths) paths.push_back(p.generic_string());
  doc["score_paths"] = paths;
  doc["triage_manifest"] = triage_manifest.generic_string();
  doc["disposition_manifest"] = disposition_manifest.generic_string();
  doc["hyperparameters"] = json::parse(models::hyperparameters_json(hyperparameters));
  doc["bootstrap"] = bootstrap;
  doc["tasks"] = tasks;
  json kinds = json::array();
  for (auto k : models) kinds.push_back(models::to_string(k));
  doc["models"] = kinds;
  doc["synth"] = {{"n_patients", synth.n_patients},
                  {"target_visits", synth.target_visits ? json(*synth.target_visits) : json(nullptr)},
                  {"seed", synth.seed},
                  {"mean_visits_per_patient", synth.mean_visits_per_patient},
                  {"p_hospitalization", synth.p_hospitalization},
                  {"p_critical", synth.p_critical},
                  {"p_reattendance", synth.p_reattendance},
                  {"p_icu_given_critical", synth.p_icu_given_critical},
                  {"p_mortality_given_critical", synth.p_mortality_given_critical},
                  {"p_minor", synth.p_minor},
                  {"p_missing_acuity", synth.p_missing_acuity},
                  {"missing_rate", synth.missing_rate},
                  {"outlier_rate", synth.outlier_rate}};
  return doc.dump();
}

fs::path model_path(const PipelineConfig& config, const Task& task, TimePoint time_point, models::ModelKind kind) {
  return config.output_dir / kModelDir /
         (task.name + "_" + std::string(to_string(time_point)) + "_" + std::string(models::to_string(kind)) +
          ".model");
}

void run_synth(const PipelineConfig& config, RunRecord& record) {
  const auto cohort = synthdata::generate_cohort(config.synth);
  synthdata::write_cohort(config.input_dir, cohort);
  record.row_counts["synth_visits"] = cohort.tables.edstays.size();
  record.row_counts["synth_patients"] = cohort.tables.patients.size();
  for (auto kind : ingest::kAllTables) {
    const auto name = std::string(ingest::file_name(kind));
    record.outputs[name] = fnv1a_hex(csv::read_text_file(config.input_dir / name));
  }
}

void run_extract_master(const PipelineConfig& config, const RunOptions& options, IssueLog& log, RunRecord& record) {
  // Every input is checked before anything is read or written.
  ingest::check_input_files(config.input_dir);
  const auto& mapping = comorbidity::MappingTable::shipped();
  const auto& complaints = cohort::ComplaintMatcher::shipped();

  auto raw = ingest::read_raw_tables(config.input_dir, ingest::ParseOptions{}, log, options.threads);
  record.row_counts["raw_edstays"] = raw.edstays.size();
  auto linked = ingest::link_tables(std::move(raw), log);
  record.row_counts["linked_stays"] = linked.stays.size();
  record.row_counts["dropped_stays"] = linked.stats.dropped_stays();
  record.row_counts["orphan_rows"] = linked.stats.orphans();

  cohort::MasterOptions mo;
  mo.lookback.years = config.lookback_years;
  mo.threads = options.threads;
  cohort::MasterStats stats;
  const auto records = cohort::build_master(linked, mapping, complaints, mo, log, &stats);
  const auto table = cohort::to_table(records, mapping, complaints);
  record.row_counts["master_rows"] = table.rows();
  record.row_counts["master_subjects"] = stats.subjects;
  write_output(config.output_dir / kMasterFile, table.to_csv(), record);
}

void run_build_benchmark(const PipelineConfig& config, IssueLog& log, RunRecord& record) {
  require_file(config.output_dir / kMasterFile, "master dataset");
  const auto master = NumericTable::read_csv(config.output_dir / kMasterFile);
  const auto cleaning = clean_split::CleaningConfig::load(config.cleaning_config);
  clean_split::BenchmarkOptions bo;
  bo.test_fraction = config.test_fraction;
  bo.seed = config.seed;
  bo.stratify = config.stratify;
  bo.strategy = config.imputation;
  const auto bench = clean_split::build_benchmark(master, cleaning, bo, log);

  record.row_counts["master_rows"] = master.rows();
  record.row_counts["excluded_minor"] = bench.exclusions.count(clean_split::ExclusionReason::Minor);
  record.row_counts["excluded_no_acuity"] = bench.exclusions.count(clean_split::ExclusionReason::NoAcuity);
  record.row_counts["benchmark_rows"] = bench.exclusions.kept.size();
  record.row_counts["train_rows"] = bench.train.rows();
  record.row_counts["test_rows"] = bench.test.rows();
  record.row_counts["cells_set_missing"] = bench.cleaning.set_missing;
  record.row_counts["cells_clamped"] = bench.cleaning.clamped;

  write_output(config.output_dir / kTrainFile, bench.train.to_csv(), record);
  write_output(config.output_dir / kTestFile, bench.test.to_csv(), record);
  write_output(config.output_dir / kSplitFile, bench.split.to_csv(), record);
  write_output(config.output_dir / kImputerFile, bench.imputer.to_json(), record);

  const auto& stay = master.column("stay_id");
  csv::Writer w({"stay_id", "reason"});
  for (const auto& [row, reason] : bench.exclusions.excluded) {
    w.add_row({csv::format_number(stay[row]), std::string(clean_split::to_string(reason))});
  }
  write_output(config.output_dir / "exclusions.csv", w.str(), record);
}

void run_train(const PipelineConfig& config, const RunOptions& options, IssueLog& log, RunRecord& record) {
  require_file(config.output_dir / kTrainFile, "training table");
  const auto train = NumericTable::read_csv(config.output_dir / kTrainFile);
  record.row_counts["train_rows"] = train.rows();
  const fs::path timings_path = config.output_dir / kModelDir / kTimingsFile;
  json timings = read_timings(timings_path);
  for (const Task* task : selected_tasks(config, options)) {
    const TimePoint tp = time_point_for(*task, options);
    const auto manifest = models::read_manifest(manifest_for(config, tp));
    auto X = models::make_feature_matrix(train, manifest, task->label);
    X.task = task->name;
    X.vitals_source = tp == TimePoint::Triage ? "triage" : "ed";
    X.split = "train";
    for (auto kind : selected_models(config, options)) {
      const auto start = std::chrono::steady_clock::now();
      const auto model = models::train(kind, X, config.seed, config.hyperparameters, options.threads, &log);
      const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      const auto path = model_path(config, *task, tp, kind);
      write_output(path, models::serialize_model(model), record, (fs::path(kModelDir) / path.filename()).string());
      timings[path.filename().string()] = seconds;
      log.info("Trained", task_label(*task, tp) + " " + std::string(models::to_string(kind)) + " in " +
                              csv::format_fixed(seconds, 2) + " s");
    }
  }
  fs::create_directories(timings_path.parent_path());
  // Wall-clock seconds live apart from the model files so those stay
  // byte-identical across runs.
  csv::write_text_file(timings_path, timings.dump(2) + "\n");
}

void run_evaluate(const PipelineConfig& config, const RunOptions& options, IssueLog& log, RunRecord& record) {
  require_file(config.output_dir / kTestFile, "test table");
  const auto test = NumericTable::read_csv(config.output_dir / kTestFile);
  record.row_counts["test_rows"] = test.rows();
  const auto timings = read_timings(config.output_dir / kModelDir / kTimingsFile);
  const auto score_defs = scores::load_scores(config.score_paths);

  std::vector<evaluate::ModelResult> results;
  std::uint64_t stream = 0;
  auto eval_options = [&] {
    evaluate::EvalOptions eo;
    eo.bootstrap = config.bootstrap;
    eo.seed = derive_seed(config.seed, ++stream);
    eo.threads = options.threads;
    return eo;
  };

  for (const Task* task : selected_tasks(config, options)) {
    const TimePoint tp = time_point_for(*task, options);
    const std::string label = task_label(*task, tp);
    const auto manifest = models::read_manifest(manifest_for(config, tp));
    auto X = models::make_feature_matrix(test, manifest, task->label);
    const auto& y = X.labels;

    for (auto kind : selected_models(config, options)) {
      const auto path = model_path(config, *task, tp, kind);
      require_file(path, "model file");
      const auto model = models::load_model(path);
      const auto p = models::predict_proba(model, X);
      const std::string key = path.filename().string();
      const double runtime = timings.contains(key) ? timings[key].get<double>() : 0.0;
      results.push_back(evaluate::evaluate_model(label, std::string(models::to_string(kind)), p, y, runtime,
                                                 static_cast<int>(manifest.size()), eval_options()));
      if (kind == models::ModelKind::RF) {
        csv::Writer w({"rank", "variable", "importance"});
        int rank = 0;
        for (const auto& [name, imp] : models::rf_variable_importance(model)) {
          w.add_row({std::to_string(++rank), name, csv::format_fixed(imp, 4)});
        }
        write_output(config.output_dir / ("importance_" + task->name + "_" + std::string(to_string(tp)) + ".csv"),
                     w.str(), record);
      }
    }

    // ESI as a score: 6 - acuity, reported back on the acuity scale.
    const auto& acuity = test.column("triage_acuity");
    std::vector<double> esi(acuity.size());
    for (std::size_t i = 0; i < acuity.size(); ++i) esi[i] = scores::esi_risk(acuity[i]);
    auto esi_result = evaluate::evaluate_model(label, "ESI", esi, y, 0.0, 1, eval_options());
    esi_result.threshold = 6.0 - esi_result.threshold;
    results.push_back(esi_result);

    const auto source = tp == TimePoint::Triage ? scores::VitalsSource::Triage : scores::VitalsSource::Ed;
    for (const auto& def : score_defs) {
      const auto s = scores::compute_scores(def, test, source);
      for (double v : s) {
        if (is_missing(v)) throw Error(ErrorCode::MissingValue, def.name + " has a missing input after imputation");
      }
      results.push_back(evaluate::evaluate_model(label, def.name, s, y, 0.0, static_cast<int>(def.inputs.size()),
                                                 eval_options()));
    }
  }

  const auto report = evaluate::build_report(std::move(results));
  evaluate::write_report(report, config.output_dir);
  for (const char* name : {"report.csv", "report.json", "figure_auroc.svg", "figure_auprc.svg", "runtime.csv"}) {
    record.outputs[name] = fnv1a_hex(csv::read_text_file(config.output_dir / name));
  }
  record.row_counts["report_rows"] = report.rows.size();

  if (fs::exists(config.output_dir / kMasterFile)) {
    const auto master = NumericTable::read_csv(config.output_dir / kMasterFile);
    const auto kept = clean_split::apply_exclusions(master).kept;
    const auto summary = evaluate::summarize_cohort(master.select_rows(kept), kSummaryStrata);
    write_output(config.output_dir / "cohort_summary.csv", summary.to_csv(), record);
  } else {
    log.warn("NoMaster", "master dataset not found; cohort_summary.csv not written");
  }
}

void run_all(const PipelineConfig& config, const RunOptions& options, IssueLog& log, RunRecord& record) {
  run_extract_master(config, options, log, record);
  run_build_benchmark(config, log, record);
  run_train(config, options, log, record);
  run_evaluate(config, options, log, record);
}

void run_predict(const fs::path& model_file, const fs::path& table_csv, const fs::path& out_csv,
                 RunRecord& record) {
  const auto model = models::load_model(model_file);
  require_file(table_csv, "input table");
  const auto table = NumericTable::read_csv(table_csv);
  const auto X = models::make_feature_matrix(table, model.manifest, "");
  const auto p = models::predict_proba(model, X);
  const auto stay = table.find("stay_id");
  csv::Writer w({"stay_id", "probability"});
  for (std::size_t r = 0; r < p.size(); ++r) {
    w.add_row({stay ? csv::format_number(table.at(r, *stay)) : std::to_string(r), csv::format_number(p[r])});
  }
  record.row_counts["predicted_rows"] = p.size();
  write_output(out_csv, w.str(), record);
}

void write_run_manifest(const PipelineConfig& config, const RunOptions& options, const IssueLog& log,
                        const RunRecord& record) {
  const std::string canonical = config.canonical_json();
  json doc;
  doc["command"] = record.command;
  doc["version"] = kVersion;
  doc["config_hash"] = fnv1a_hex(canonical);
  doc["config"] = json::parse(canonical);
  doc["seed"] = config.seed;
  doc["threads"] = options.threads;
  doc["time_point"] = options.time_point ? json(std::string(to_string(*options.time_point))) : json(nullptr);
  doc["row_counts"] = record.row_counts;
  doc["outputs"] = record.outputs;
  doc["issue_counts"] = log.counts();
  fs::create_directories(config.output_dir);
  csv::write_text_file(config.output_dir / ("run_manifest_" + record.command + ".json"), doc.dump(2) + "\n");
}

}  // namespace edbench::pipeline
