// Acceptance runner: one PASS/FAIL/SKIP line per criterion.
//
// Criteria 1-4 need the credentialed source tables; point EDBENCH_MIMIC_DIR at
// a directory holding the nine CSV files. Everything else runs on generated
// data. Exit status is 1 when any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "edbench/clean_split.hpp"
#include "edbench/cohort.hpp"
#include "edbench/common/csv.hpp"
#include "edbench/common/error.hpp"
#include "edbench/common/random.hpp"
#include "edbench/comorbidity.hpp"
#include "edbench/evaluate.hpp"
#include "edbench/models.hpp"
#include "edbench/pipeline.hpp"
#include "edbench/scores.hpp"
#include "edbench/synthdata.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

namespace {

using namespace edbench;
namespace fs = std::filesystem;
namespace t = edbench::testing;
using json = nlohmann::json;

enum class Status { Pass, Fail, Skip };

struct Outcome {
  Status status = Status::Pass;
  std::string detail;
};

Outcome pass(std::string d) { return {Status::Pass, std::move(d)}; }
Outcome fail(std::string d) { return {Status::Fail, std::move(d)}; }
Outcome skip(std::string d) { return {Status::Skip, std::move(d)}; }
Outcome verdict(bool ok, std::string d) { return {ok ? Status::Pass : Status::Fail, std::move(d)}; }

std::string num(double v, int decimals = 4) { return csv::format_fixed(v, decimals); }

double prevalence(const NumericTable& table, const std::string& column) {
  const auto& c = table.column(column);
  double k = 0;
  for (double v : c) k += v == 1.0 ? 1 : 0;
  return k / static_cast<double>(c.size());
}

// First metric value for (task label, model) in report.json.
std::optional<double> report_auroc(const fs::path& report_json, const std::string& task, const std::string& model) {
  const auto doc = json::parse(csv::read_text_file(report_json));
  for (const auto& row : doc["rows"]) {
    if (row["task"] == task && row["model"] == model) return row["auroc"]["value"].get<double>();
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Credentialed run, shared by criteria 1-4.

struct RealRun {
  pipeline::RunRecord record;
  fs::path out;
  NumericTable kept;
};

const RealRun& real_run(const fs::path& source) {
  static std::optional<RealRun> run;
  if (run) return *run;
  RealRun r;
  pipeline::PipelineConfig config;
  config.input_dir = source;
  const char* out = std::getenv("EDBENCH_ACCEPTANCE_OUT");
  r.out = out ? fs::path(out) : fs::temp_directory_path() / "edbench_acceptance_mimic";
  config.output_dir = r.out;
  pipeline::RunOptions options;
  options.threads = std::max(1u, std::thread::hardware_concurrency());
  IssueLog log(&std::cerr);
  log.set_message_cap(20);
  pipeline::run_all(config, options, log, r.record);
  const auto master = NumericTable::read_csv(r.out / pipeline::kMasterFile);
  r.kept = master.select_rows(clean_split::apply_exclusions(master).kept);
  run = std::move(r);
  return *run;
}

bool within_relative(double got, double want, double tol) { return std::abs(got - want) <= tol * want; }

Outcome criterion_1(const fs::path& source) {
  const auto& r = real_run(source);
  const double visits = static_cast<double>(r.record.row_counts.at("master_rows"));
  const double patients = static_cast<double>(r.record.row_counts.at("master_subjects"));
  return verdict(within_relative(visits, 448972, 0.01) && within_relative(patients, 216877, 0.01),
                 "visits " + num(visits, 0) + " (448972), patients " + num(patients, 0) + " (216877), tolerance 1%");
}

Outcome criterion_2(const fs::path& source) {
  const auto& r = real_run(source);
  const double kept = static_cast<double>(r.record.row_counts.at("benchmark_rows"));
  return verdict(within_relative(kept, 441437, 0.01), "episodes " + num(kept, 0) + " (441437), tolerance 1%");
}

Outcome criterion_3(const fs::path& source) {
  const auto& r = real_run(source);
  const std::vector<std::pair<std::string, double>> targets = {{"outcome_hospitalization", 0.4734},
                                                                {"outcome_critical", 0.0592},
                                                                {"outcome_ed_revisit_3d", 0.0347}};
  bool ok = true;
  std::string d;
  for (const auto& [column, want] : targets) {
    const double got = prevalence(r.kept, column);
    ok = ok && std::abs(got - want) <= 0.005;
    d += column + " " + num(100 * got, 2) + "% (" + num(100 * want, 2) + "%) ";
  }
  return verdict(ok, d + "tolerance 0.5 pp");
}

Outcome criterion_4(const fs::path& source) {
  const auto& r = real_run(source);
  const auto report = r.out / "report.json";
  struct Target {
    std::string task, model;
    double want;
  };
  const std::vector<Target> targets = {{"critical@triage", "GB", 0.881},
                                       {"hospitalization@triage", "GB", 0.820},
                                       {"hospitalization@triage", "ESI", 0.711}};
  bool ok = true;
  std::string d;
  for (const auto& tg : targets) {
    const auto got = report_auroc(report, tg.task, tg.model);
    if (!got) return fail("no report row for " + tg.task + " " + tg.model);
    ok = ok && std::abs(*got - tg.want) <= 0.015;
    d += tg.model + " " + tg.task + " " + num(*got, 3) + " (" + num(tg.want, 3) + ") ";
  }
  return verdict(ok, d + "tolerance 0.015");
}

// ---------------------------------------------------------------------------
// Property suite.

Outcome criterion_5() {
  Rng rng(20240501);
  double worst_auroc = 0.0;
  double worst_ld = 0.0;
  std::size_t auprc_mismatch = 0;
  std::vector<double> s;
  std::vector<std::uint8_t> y;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + rng.index(199);
    const bool ties = trial % 2 == 0;
    const double p = rng.uniform(0.05, 0.95);
    s.assign(n, 0.0);
    y.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = rng.bernoulli(p);
      s[i] = ties ? static_cast<double>(rng.index(8)) / 4.0 : rng.uniform() + 0.25 * y[i];
    }
    // Both classes present: one forced positive, one forced negative.
    const std::size_t i = rng.index(n);
    const std::size_t j = (i + 1 + rng.index(n - 1)) % n;
    y[i] = 1;
    y[j] = 0;
    worst_auroc = std::max(worst_auroc, std::abs(evaluate::auroc(s, y) - t::brute_auroc(s, y)));
    const double ap = evaluate::auprc(s, y);
    if (ap != t::brute_auprc(s, y)) ++auprc_mismatch;
    worst_ld = std::max(worst_ld, static_cast<double>(std::abs(static_cast<long double>(ap) - t::brute_auprc_ld(s, y))));
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "1000 fixtures: max auroc gap %.3g, auprc mismatches %zu, max long-double gap %.3g",
                worst_auroc, auprc_mismatch, worst_ld);
  return verdict(worst_auroc <= 1e-12 && auprc_mismatch == 0 && worst_ld <= 1e-12, buf);
}

Outcome criterion_6() {
  Rng rng(6);
  double worst_lr = 0.0;
  for (int point = 0; point < 20; ++point) {
    const std::size_t n = 50, d = 6;
    std::vector<double> Z(n * d);
    for (double& z : Z) z = rng.normal();
    std::vector<std::uint8_t> y(n);
    for (auto& v : y) v = rng.bernoulli(0.3);
    std::vector<double> w(d + 1);
    for (double& v : w) v = rng.normal(0, 2);
    const double C = rng.uniform(0.1, 10);
    std::vector<double> g;
    models::lr_objective(Z, y, d, w, C, &g);
    const auto fd = t::numeric_gradient(
        [&](const std::vector<double>& p) { return models::lr_objective(Z, y, d, p, C, nullptr); }, w, 1e-5);
    worst_lr = std::max(worst_lr, t::relative_error(g, fd));
  }
  double worst_mlp = 0.0;
  for (int point = 0; point < 20; ++point) {
    const std::size_t n = 40, d = 5;
    models::MlpNet net;
    net.inputs = d;
    net.hidden = 8;
    std::vector<double> params(net.parameter_count());
    for (double& v : params) v = rng.normal(0, 0.7);
    net.unflatten(params);
    std::vector<double> Z(n * d);
    for (double& z : Z) z = rng.normal();
    std::vector<std::uint8_t> y(n);
    for (auto& v : y) v = rng.bernoulli(0.5);
    std::vector<double> g;
    models::mlp_loss(net, Z.data(), y.data(), n, &g);
    models::MlpNet probe = net;
    const auto fd = t::numeric_gradient(
        [&](const std::vector<double>& p) {
          probe.unflatten(p);
          return models::mlp_loss(probe, Z.data(), y.data(), n, nullptr);
        },
        params, 1e-6);
    worst_mlp = std::max(worst_mlp, t::relative_error(g, fd));
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "20 points each: LR max relative error %.3g (< 1e-4), MLP %.3g (< 1e-3)", worst_lr,
                worst_mlp);
  return verdict(worst_lr < 1e-4 && worst_mlp < 1e-3, buf);
}

bool noisy_linear(const double* x, std::size_t d, double noise) {
  double s = 0.0;
  for (std::size_t j = 0; j < d; ++j) s += x[j] / static_cast<double>(j + 1);
  return s + noise > 0.2;
}

Outcome criterion_7() {
  std::size_t increases = 0;
  std::size_t stages = 0;
  for (std::uint64_t fixture = 0; fixture < 5; ++fixture) {
    const auto X = t::random_matrix(400 + 100 * fixture, 4 + fixture, 700 + fixture, noisy_linear);
    const auto m = models::train_gb(X, fixture);
    if (m.deviance.size() != 101) return fail("expected 101 deviance entries, got " + std::to_string(m.deviance.size()));
    for (std::size_t i = 1; i < m.deviance.size(); ++i) {
      ++stages;
      if (m.deviance[i] > m.deviance[i - 1]) ++increases;
    }
  }
  return verdict(increases == 0, "5 fixtures x 100 stages: " + std::to_string(increases) + " increases in " +
                                     std::to_string(stages) + " stage transitions");
}

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

Outcome criterion_8() {
  namespace ch = edbench::testing::charts;
  using Chart = std::map<std::string, std::function<int(double)>>;
  const Chart news = {{"resprate", ch::news_resprate}, {"o2sat", ch::news_o2sat}, {"temperature", ch::news_temperature},
                      {"sbp", ch::news_sbp}, {"heartrate", ch::news_heartrate}};
  const std::map<std::string, Chart> charts = {
      {"NEWS", news},
      {"NEWS2", news},
      {"MEWS",
       {{"sbp", ch::mews_sbp}, {"heartrate", ch::mews_heartrate}, {"resprate", ch::mews_resprate},
        {"temperature", ch::mews_temperature}}},
      {"REMS",
       {{"age", ch::rems_age}, {"map", ch::rems_map}, {"heartrate", ch::rems_heartrate},
        {"resprate", ch::rems_resprate}, {"o2sat", ch::rems_o2sat}}},
      {"CART",
       {{"resprate", ch::cart_resprate}, {"heartrate", ch::cart_heartrate}, {"dbp", ch::cart_dbp},
        {"age", ch::cart_age}}},
  };
  const auto defs = scores::load_scores(scores::shipped_score_paths());
  std::size_t checked = 0;
  std::size_t mismatches = 0;
  std::string first;
  for (const auto& [name, chart] : charts) {
    const auto def = std::find_if(defs.begin(), defs.end(), [&](const auto& d) { return d.name == name; });
    if (def == defs.end()) return fail("score " + name + " not shipped");
    if (def->components.size() != chart.size()) return fail(name + " component count differs from its chart");
    for (const auto& comp : def->components) {
      const auto oracle = chart.find(comp.variable);
      if (oracle == chart.end()) return fail(name + " has an unexpected component " + comp.variable);
      for (double v : grid(comp.variable)) {
        ++checked;
        if (scores::band_points(v, comp) != oracle->second(v)) {
          if (mismatches++ == 0) first = " (first: " + name + " " + comp.variable + " at " + csv::format_number(v) + ")";
        }
      }
    }
  }
  return verdict(mismatches == 0, std::to_string(checked) + " grid points, " + std::to_string(mismatches) +
                                      " mismatches" + first);
}

// Shared 20,000-visit synthetic run for criteria 9, 10, 12 and 14.
struct SynthRun {
  t::TempDir dir;
  pipeline::PipelineConfig config;
  synthdata::SynthCohort cohort;
  bool extracted = false;
  bool evaluated = false;
};

SynthRun& synth_run() {
  static SynthRun run;
  static bool ready = false;
  if (!ready) {
    run.config.input_dir = run.dir / "raw";
    run.config.output_dir = run.dir / "out";
    run.config.seed = 17;
    run.config.synth = t::synth_config(20000, 17);
    run.config.tasks = {"hospitalization"};
    run.config.models = {models::ModelKind::LR, models::ModelKind::RF, models::ModelKind::GB};
    pipeline::RunRecord record;
    pipeline::run_synth(run.config, record);
    ready = true;
  }
  return run;
}

void ensure_extracted(SynthRun& run) {
  if (run.extracted) return;
  IssueLog log;
  pipeline::RunRecord record;
  pipeline::run_extract_master(run.config, {}, log, record);
  run.extracted = true;
}

void ensure_evaluated(SynthRun& run) {
  if (run.evaluated) return;
  ensure_extracted(run);
  IssueLog log;
  pipeline::RunRecord record;
  pipeline::RunOptions options;
  options.threads = std::max(1u, std::thread::hardware_concurrency());
  pipeline::run_build_benchmark(run.config, log, record);
  pipeline::run_train(run.config, options, log, record);
  pipeline::run_evaluate(run.config, options, log, record);
  run.evaluated = true;
}

Outcome criterion_9() {
  auto& run = synth_run();
  ensure_extracted(run);
  const auto truth = synthdata::read_ground_truth(run.config.input_dir / "ground_truth.csv");
  const auto master = NumericTable::read_csv(run.config.output_dir / pipeline::kMasterFile);
  if (master.rows() != truth.size()) {
    return fail("master has " + std::to_string(master.rows()) + " rows, ground truth " + std::to_string(truth.size()));
  }
  const std::vector<std::pair<std::string, bool synthdata::GroundTruth::*>> labels = {
      {"outcome_hospitalization", &synthdata::GroundTruth::hospitalization},
      {"outcome_inhospital_mortality", &synthdata::GroundTruth::inhospital_mortality},
      {"outcome_icu_transfer_12h", &synthdata::GroundTruth::icu_transfer_12h},
      {"outcome_critical", &synthdata::GroundTruth::critical},
      {"outcome_ed_revisit_3d", &synthdata::GroundTruth::ed_revisit_3d}};
  const auto& stay = master.column("stay_id");
  std::size_t disagreements = 0;
  for (std::size_t r = 0; r < master.rows(); ++r) {
    if (static_cast<std::int64_t>(stay[r]) != truth[r].stay_id) return fail("row order differs from ground truth");
    for (const auto& [column, field] : labels) {
      if ((master.column(column)[r] == 1.0) != truth[r].*field) ++disagreements;
    }
  }
  const std::size_t n = master.rows();
  const std::vector<std::pair<std::string, double>> targets = {{"outcome_hospitalization", 0.4734},
                                                                {"outcome_critical", 0.0592},
                                                                {"outcome_ed_revisit_3d", 0.0347}};
  bool inside = true;
  std::string d = "agreement " + num(100.0 * (1.0 - static_cast<double>(disagreements) / (5.0 * n)), 2) + "% over " +
                  std::to_string(n) + " visits;";
  for (const auto& [column, p] : targets) {
    const auto k = static_cast<std::size_t>(prevalence(master, column) * static_cast<double>(n) + 0.5);
    const auto [lo, hi] = t::binomial_interval(n, p, 0.01);
    inside = inside && k >= lo && k <= hi;
    d += " " + column + " " + std::to_string(k) + " in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]";
  }
  return verdict(disagreements == 0 && inside, d);
}

Outcome criterion_10() {
  auto& run = synth_run();
  ensure_evaluated(run);
  const auto report = run.config.output_dir / "report.json";
  const std::string task = "hospitalization@triage";
  std::map<std::string, double> auc;
  for (const char* m : {"LR", "RF", "GB", "NEWS", "NEWS2", "MEWS", "REMS", "CART"}) {
    const auto v = report_auroc(report, task, m);
    if (!v) return fail(std::string("no report row for ") + m);
    auc[m] = *v;
  }
  bool ok = auc["GB"] > 0.70 && auc["RF"] > 0.70 && std::abs(auc["LR"] - auc["GB"]) <= 0.1;
  std::string d;
  for (const auto& [m, v] : auc) {
    d += m + " " + num(v, 3) + " ";
    if (m != "LR" && m != "RF" && m != "GB") ok = ok && v > 0.5;
  }
  return verdict(ok, d + "(GB, RF > 0.70; scores > 0.5; |LR - GB| <= 0.1)");
}

std::string quoted(const fs::path& p) { return "\"" + p.string() + "\""; }

int cli(const fs::path& config, const std::string& args, const fs::path& log) {
  return t::run_command(quoted(EDBENCH_CLI_PATH) + " --config " + quoted(config) + " " + args + " 2> " + quoted(log));
}

std::vector<fs::path> model_files(const fs::path& out) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(out / pipeline::kModelDir)) {
    if (e.path().extension() == ".model") files.push_back(e.path().filename());
  }
  std::sort(files.begin(), files.end());
  return files;
}

Outcome criterion_11() {
  const char* config = R"({
    "input_dir": "raw", "output_dir": "out", "seed": 5, "bootstrap": 20,
    "hyperparameters": {"rf": {"n_trees": 30, "max_depth": 10}, "gb": {"n_estimators": 50},
                        "mlp": {"hidden": 16, "epochs": 5}},
    "synth": {"target_visits": 3000, "seed": 5}
  })";
  t::TempDir a, b, c;
  for (const auto* d : {&a, &b, &c}) {
    csv::write_text_file(*d / "config.json", config);
    if (cli(*d / "config.json", "synth", *d / "synth.log") != 0) return fail("synth failed in " + d->path().string());
  }
  if (cli(a / "config.json", "--threads 1 all", a / "all.log") != 0) return fail("first run failed");
  if (cli(b / "config.json", "--threads 1 all", b / "all.log") != 0) return fail("second run failed");
  if (cli(c / "config.json", "--threads 4 all", c / "all.log") != 0) return fail("four-thread run failed");

  std::vector<std::string> differ;
  auto same = [&](const fs::path& x, const fs::path& y, const std::string& what) {
    if (!fs::exists(x) || t::read_file(x) != t::read_file(y)) differ.push_back(what);
  };
  const auto oa = a / "out", ob = b / "out", oc = c / "out";
  same(oa / pipeline::kMasterFile, ob / pipeline::kMasterFile, pipeline::kMasterFile);
  same(oa / pipeline::kSplitFile, ob / pipeline::kSplitFile, pipeline::kSplitFile);
  const auto models_a = model_files(oa);
  if (models_a != model_files(ob) || models_a != model_files(oc)) differ.push_back("model file set");
  for (const auto& m : models_a) {
    same(oa / pipeline::kModelDir / m, ob / pipeline::kModelDir / m, m.string());
    same(oa / pipeline::kModelDir / m, oc / pipeline::kModelDir / m, m.string() + " (4 threads)");
  }
  same(oa / "report.csv", ob / "report.csv", "report.csv");
  same(oa / "report.csv", oc / "report.csv", "report.csv (4 threads)");
  std::string d = std::to_string(models_a.size()) + " model files, master, split and report compared";
  if (differ.empty()) return pass(d + "; byte-identical across two 1-thread runs and a 4-thread run");
  std::string list;
  for (const auto& x : differ) list += " " + x;
  return fail("differs:" + list);
}

Outcome criterion_12() {
  auto& run = synth_run();
  ensure_evaluated(run);
  std::size_t missing = 0;
  std::size_t cells = 0;
  for (const char* name : {pipeline::kTrainFile, pipeline::kTestFile}) {
    const auto table = NumericTable::read_csv(run.config.output_dir / name);
    for (const auto& manifest_path : {run.config.triage_manifest, run.config.disposition_manifest}) {
      for (const auto& col : models::read_manifest(manifest_path)) {
        for (double v : table.column(col)) {
          ++cells;
          missing += is_missing(v) ? 1 : 0;
        }
      }
    }
  }

  const auto cleaning = clean_split::CleaningConfig::load(clean_split::CleaningConfig::default_path());
  Rng rng(12);
  std::size_t violations = 0;
  for (const auto& [name, bounds] : cleaning.variables) {
    const double span = bounds.outer_high - bounds.outer_low;
    std::vector<double> xs(100000);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      // A slice of the draws lands exactly on the bounds.
      if (i % 50 == 0) {
        const double edges[] = {bounds.outer_low, bounds.inner_low, bounds.inner_high, bounds.outer_high};
        xs[i] = edges[rng.index(4)];
      } else {
        xs[i] = rng.uniform(bounds.outer_low - span, bounds.outer_high + span);
      }
    }
    std::sort(xs.begin(), xs.end());
    double last = -INFINITY;
    for (double x : xs) {
      const double c = clean_split::clean_value(x, bounds);
      const double cc = clean_split::clean_value(c, bounds);
      if (!((is_missing(c) && is_missing(cc)) || c == cc)) ++violations;
      if (!is_missing(c)) {
        if (c < last) ++violations;
        last = c;
      }
    }
  }
  return verdict(missing == 0 && violations == 0,
                 std::to_string(missing) + " missing of " + std::to_string(cells) + " feature cells; " +
                     std::to_string(violations) + " idempotence/monotonicity violations over " +
                     std::to_string(cleaning.variables.size()) + " variables x 100000 values");
}

Outcome criterion_13() {
  const auto& mapping = comorbidity::MappingTable::shipped();
  std::vector<std::pair<std::string, int>> pool;
  for (const auto& cat : mapping.categories()) {
    for (const auto& p : cat.icd9) pool.emplace_back(p, 9);
    for (const auto& p : cat.icd10) pool.emplace_back(p, 10);
  }
  ingest::RawTables raw;
  raw.patients = {t::patient(1, 60)};
  const auto visit = t::ts(2153, 4, 2, 10);
  raw.edstays = {t::stay(1, 11, visit, 5, 302)};
  raw.triage = {t::triage(1, 11)};
  raw.admissions = {t::admission(1, 301, t::ts(2151, 8, 1), 4), t::admission(1, 302, visit + 4 * kSecondsPerHour, 6)};
  raw.diagnoses = {t::diagnosis(1, 301, "I10", 10), t::diagnosis(1, 301, "E119", 10)};
  auto build = [&](bool include_index) {
    IssueLog log;
    cohort::MasterOptions o;
    o.lookback.include_index_admission = include_index;
    return cohort::build_master(ingest::link_tables(raw, log), mapping, cohort::ComplaintMatcher::shipped(), o, log)
        .at(0);
  };
  const auto baseline = build(false);
  Rng rng(13);
  std::size_t changed = 0;
  std::size_t witnessed = 0;
  const int trials = 200;
  const auto base_dx = raw.diagnoses;
  for (int trial = 0; trial < trials; ++trial) {
    raw.diagnoses = base_dx;
    const std::size_t k = 1 + rng.index(12);
    for (std::size_t j = 0; j < k; ++j) {
      const auto& [code, version] = pool[rng.index(pool.size())];
      raw.diagnoses.push_back(t::diagnosis(1, 302, code + std::to_string(rng.index(10)), version,
                                           static_cast<int>(j + 1)));
    }
    const auto m = build(false);
    if (m.cci != baseline.cci || m.eci != baseline.eci) ++changed;
    // The same mutation is visible when the index admission is let in.
    const auto leaky = build(true);
    if (leaky.cci != baseline.cci || leaky.eci != baseline.eci) ++witnessed;
  }
  raw.diagnoses = base_dx;
  return verdict(changed == 0 && witnessed > 0,
                 std::to_string(trials) + " mutations of the index admission's codes: " + std::to_string(changed) +
                     " changed a comorbidity field (" + std::to_string(witnessed) +
                     " would have with the index admission included)");
}

Outcome criterion_14() {
  std::string d;
  bool ok = true;
  for (std::size_t n : {5u, 11u, 997u, 20000u, 441437u}) {
    std::vector<std::int64_t> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<std::int64_t>(30000000 + 7 * i);
    const auto s = clean_split::split(ids, 0.2, 42);
    const auto want = static_cast<std::size_t>(std::llround(0.2 * static_cast<double>(n)));
    ok = ok && s.n_test() == want && s.n_train() == n - want;
    if (n == 441437) {
      ok = ok && s.n_test() == 88287;
      d += "N=441437 -> test " + std::to_string(s.n_test()) + ", train " + std::to_string(s.n_train()) + "; ";
    }
  }

  Rng rng(14);
  std::vector<std::int64_t> ids(20000);
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<std::int64_t>(1000 + 3 * i);
  const auto reference = clean_split::split(ids, 0.2, 42);
  int order_failures = 0;
  for (int trial = 0; trial < 5; ++trial) {
    rng.shuffle(ids);
    if (!(clean_split::split(ids, 0.2, 42) == reference)) ++order_failures;
  }
  ok = ok && order_failures == 0;
  d += std::to_string(order_failures) + " of 5 shuffles changed the assignment; ";

  auto& run = synth_run();
  ensure_extracted(run);
  const auto master = NumericTable::read_csv(run.config.output_dir / pipeline::kMasterFile);
  const auto cleaning = clean_split::CleaningConfig::load(clean_split::CleaningConfig::default_path());
  clean_split::BenchmarkOptions options;
  options.seed = 42;
  IssueLog log;
  const auto bench = clean_split::build_benchmark(master, cleaning, options, log);
  auto mutated = master;
  const auto& stay = master.column("stay_id");
  std::size_t touched = 0;
  for (std::size_t r = 0; r < mutated.rows(); ++r) {
    const auto id = static_cast<std::int64_t>(stay[r]);
    if (!bench.split.by_stay.count(id) || bench.split.at(id) != clean_split::Assignment::Test) continue;
    ++touched;
    for (std::size_t c = 0; c < mutated.cols(); ++c) {
      const auto& name = mutated.names()[c];
      if (clean_split::is_passthrough_column(name) || name == "age" || name == "triage_acuity") continue;
      mutated.column(c)[r] = rng.bernoulli(0.3) ? kMissing : rng.uniform(-1e4, 1e4);
    }
  }
  const auto again = clean_split::build_benchmark(mutated, cleaning, options, log);
  const bool imputer_same = again.imputer == bench.imputer;
  const bool split_same = again.split == bench.split;
  const bool train_same = again.train == bench.train;
  ok = ok && imputer_same && split_same && train_same && touched > 0;
  d += std::to_string(touched) + " test rows scrambled: imputer " + (imputer_same ? "unchanged" : "CHANGED") +
       ", split " + (split_same ? "unchanged" : "CHANGED") + ", train " + (train_same ? "unchanged" : "CHANGED");
  return verdict(ok, d);
}

}  // namespace

int main() {
  const char* mimic = std::getenv("EDBENCH_MIMIC_DIR");
  const std::optional<fs::path> source = mimic && *mimic ? std::optional<fs::path>(mimic) : std::nullopt;
  auto gated = [&](Outcome (*fn)(const fs::path&)) {
    return [fn, &source]() { return source ? fn(*source) : skip("EDBENCH_MIMIC_DIR not set"); };
  };

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"master dataset cardinality", gated(criterion_1)},
      {"post-exclusion cohort size", gated(criterion_2)},
      {"outcome prevalences", gated(criterion_3)},
      {"model metrics", gated(criterion_4)},
      {"metric oracle equivalence", criterion_5},
      {"gradient checks", criterion_6},
      {"GB deviance monotonicity", criterion_7},
      {"score table golden grids", criterion_8},
      {"synthetic label round trip", criterion_9},
      {"learnability smoke test", criterion_10},
      {"determinism", criterion_11},
      {"cleaning and imputation invariants", criterion_12},
      {"comorbidity leakage guard", criterion_13},
      {"split integrity", criterion_14},
  };

  int failures = 0;
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& [name, fn] = criteria[i];
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const char* tag = o.status == Status::Pass ? "PASS" : o.status == Status::Fail ? "FAIL" : "SKIP";
    if (o.status == Status::Fail) ++failures;
    std::printf("criterion %2zu %s  %s: %s [%.1f s]\n", i + 1, tag, name.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%d failed, total %.1f s\n", failures, total);
  return failures == 0 ? 0 : 1;
}
