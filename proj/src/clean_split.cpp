#include "edbench/clean_split.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "edbench/common/csv.hpp"
#include "edbench/common/error.hpp"
#include "edbench/common/random.hpp"

namespace edbench::clean_split {

using nlohmann::json;

CleaningConfig CleaningConfig::parse(std::string_view json_text) {
  CleaningConfig config;
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadConfig, std::string("cleaning config: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::BadConfig, "cleaning config must be an object");
  for (const auto& [name, entry] : doc.items()) {
    auto pair = [&](const char* key) {
      if (!entry.contains(key) || !entry[key].is_array() || entry[key].size() != 2 ||
          !entry[key][0].is_number() || !entry[key][1].is_number()) {
        throw Error(ErrorCode::BadConfig, "cleaning config '" + name + "': '" + key + "' must be [low, high]");
      }
      return std::pair(entry[key][0].get<double>(), entry[key][1].get<double>());
    };
    const auto outer = pair("outer");
    const auto inner = pair("inner");
    Bounds b{outer.first, inner.first, inner.second, outer.second};
    if (!(b.outer_low <= b.inner_low && b.inner_low <= b.inner_high && b.inner_high <= b.outer_high)) {
      throw Error(ErrorCode::BadConfig, "cleaning config '" + name + "': bounds must nest");
    }
    config.variables[name] = b;
  }
  return config;
}

CleaningConfig CleaningConfig::load(const std::filesystem::path& path) {
  return parse(csv::read_text_file(path));
}

std::filesystem::path CleaningConfig::default_path() {
  return std::filesystem::path(EDBENCH_DATA_DIR) / "cleaning.json";
}

std::optional<Bounds> CleaningConfig::bounds_for(std::string_view column) const {
  if (auto it = variables.find(std::string(column)); it != variables.end()) return it->second;
  for (const auto& [name, b] : variables) {
    if (column.size() > name.size() + 1 && column.substr(column.size() - name.size()) == name &&
        column[column.size() - name.size() - 1] == '_') {
      return b;
    }
  }
  return std::nullopt;
}

double clean_value(double value, const Bounds& bounds) {
  if (is_missing(value)) return value;
  if (value < bounds.outer_low || value > bounds.outer_high) return kMissing;
  return std::clamp(value, bounds.inner_low, bounds.inner_high);
}

bool is_passthrough_column(std::string_view name) {
  return name == "subject_id" || name == "stay_id" || name == "hadm_id" ||
         name.rfind("outcome_", 0) == 0;
}

CleaningStats clean_table(NumericTable& table, const CleaningConfig& config, IssueLog& log) {
  CleaningStats stats;
  for (std::size_t c = 0; c < table.cols(); ++c) {
    const auto& name = table.names()[c];
    if (is_passthrough_column(name)) continue;
    auto bounds = config.bounds_for(name);
    if (!bounds) continue;
    std::size_t outliers = 0;
    std::size_t clamped = 0;
    for (double& v : table.column(c)) {
      if (is_missing(v)) continue;
      const double cleaned = clean_value(v, *bounds);
      if (is_missing(cleaned)) {
        ++outliers;
      } else if (cleaned != v) {
        ++clamped;
      }
      v = cleaned;
    }
    if (outliers > 0) log.info("OutlierRemoved", name + ": " + std::to_string(outliers) + " values set missing");
    if (clamped > 0) log.info("ValueClamped", name + ": " + std::to_string(clamped) + " values clamped");
    stats.set_missing += outliers;
    stats.clamped += clamped;
  }
  return stats;
}

std::string_view to_string(ExclusionReason reason) {
  return reason == ExclusionReason::Minor ? "minor" : "no_acuity";
}

std::size_t Exclusions::count(ExclusionReason reason) const {
  return static_cast<std::size_t>(std::count_if(excluded.begin(), excluded.end(),
                                                [&](const auto& e) { return e.second == reason; }));
}

Exclusions apply_exclusions(const NumericTable& master, int min_age) {
  const auto& age = master.column("age");
  const auto& acuity = master.column("triage_acuity");
  Exclusions out;
  for (std::size_t r = 0; r < master.rows(); ++r) {
    if (is_missing(age[r]) || age[r] < min_age) {
      out.excluded.emplace_back(r, ExclusionReason::Minor);
    } else if (is_missing(acuity[r])) {
      out.excluded.emplace_back(r, ExclusionReason::NoAcuity);
    } else {
      out.kept.push_back(r);
    }
  }
  return out;
}

std::size_t SplitAssignment::n_test() const {
  return static_cast<std::size_t>(std::count_if(by_stay.begin(), by_stay.end(),
                                                [](const auto& e) { return e.second == Assignment::Test; }));
}

Assignment SplitAssignment::at(std::int64_t stay_id) const {
  auto it = by_stay.find(stay_id);
  if (it == by_stay.end()) {
    throw Error(ErrorCode::ManifestMismatch, "stay " + std::to_string(stay_id) + " missing from split");
  }
  return it->second;
}

std::string SplitAssignment::to_csv() const {
  csv::Writer w({"stay_id", "assignment"});
  w.add_comment("seed=" + std::to_string(seed) + " test_fraction=" + csv::format_number(test_fraction));
  for (const auto& [stay, a] : by_stay) {
    w.add_row({std::to_string(stay), a == Assignment::Test ? "test" : "train"});
  }
  return w.str();
}

SplitAssignment SplitAssignment::read_csv(const std::filesystem::path& path) {
  const auto text = csv::read_text_file(path);
  SplitAssignment s;
  std::string_view body = text;
  while (!body.empty() && body.front() == '#') {
    const auto eol = body.find('\n');
    std::string_view comment = body.substr(1, eol == std::string_view::npos ? body.size() - 1 : eol - 1);
    if (auto p = comment.find("seed="); p != std::string_view::npos) {
      auto end = comment.find(' ', p);
      s.seed = static_cast<std::uint64_t>(csv::parse_integer(comment.substr(p + 5, end - p - 5)).value_or(0));
    }
    if (auto p = comment.find("test_fraction="); p != std::string_view::npos) {
      s.test_fraction = csv::parse_double(comment.substr(p + 14)).value_or(0.2);
    }
    body.remove_prefix(eol == std::string_view::npos ? body.size() : eol + 1);
  }
  const auto doc = csv::parse(body);
  const auto sc = doc.column("stay_id");
  const auto ac = doc.column("assignment");
  if (!sc || !ac) throw Error(ErrorCode::MissingColumn, path.string() + ": needs stay_id and assignment");
  for (const auto& row : doc.rows) {
    auto id = csv::parse_integer(row[*sc]);
    if (!id) throw Error(ErrorCode::MalformedRow, path.string() + ": bad stay_id '" + row[*sc] + "'");
    s.by_stay[*id] = row[*ac] == "test" ? Assignment::Test : Assignment::Train;
  }
  return s;
}

SplitAssignment split(const std::vector<std::int64_t>& stay_ids, double test_fraction,
                      std::uint64_t seed, const std::vector<int>* strata) {
  if (!(test_fraction >= 0.0 && test_fraction <= 1.0)) {
    throw Error(ErrorCode::BadConfig, "test_fraction must lie in [0, 1]");
  }
  SplitAssignment out;
  out.seed = seed;
  out.test_fraction = test_fraction;
  const std::size_t n = stay_ids.size();
  const auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));

  // Canonical order first, so the assignment does not depend on row order.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return stay_ids[a] < stay_ids[b]; });
  for (std::size_t i = 1; i < n; ++i) {
    if (stay_ids[order[i]] == stay_ids[order[i - 1]]) {
      throw Error(ErrorCode::DuplicateKey, "stay " + std::to_string(stay_ids[order[i]]) + " appears twice");
    }
  }

  Rng rng(seed);
  if (!strata) {
    std::vector<std::int64_t> ids;
    ids.reserve(n);
    for (auto i : order) ids.push_back(stay_ids[i]);
    rng.shuffle(ids);
    for (std::size_t i = 0; i < n; ++i) out.by_stay[ids[i]] = i < n_test ? Assignment::Test : Assignment::Train;
    return out;
  }

  std::map<int, std::vector<std::int64_t>> groups;
  for (auto i : order) groups[(*strata)[i]].push_back(stay_ids[i]);
  // Largest remainder: floor shares first, leftovers to the biggest fractions.
  std::vector<std::pair<int, std::size_t>> quota;
  std::vector<std::tuple<double, int, std::size_t>> remainders;
  std::size_t assigned = 0;
  std::size_t k = 0;
  for (const auto& [label, ids] : groups) {
    const double exact = static_cast<double>(n_test) * static_cast<double>(ids.size()) / static_cast<double>(n);
    const auto base = static_cast<std::size_t>(std::floor(exact));
    quota.emplace_back(label, base);
    remainders.emplace_back(exact - static_cast<double>(base), label, k++);
    assigned += base;
  }
  std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
    return std::get<0>(a) > std::get<0>(b) || (std::get<0>(a) == std::get<0>(b) && std::get<1>(a) < std::get<1>(b));
  });
  for (std::size_t i = 0; assigned < n_test && i < remainders.size(); ++i, ++assigned) {
    ++quota[std::get<2>(remainders[i])].second;
  }
  std::size_t g = 0;
  for (auto& [label, ids] : groups) {
    rng.shuffle(ids);
    const std::size_t q = quota[g++].second;
    for (std::size_t i = 0; i < ids.size(); ++i) out.by_stay[ids[i]] = i < q ? Assignment::Test : Assignment::Train;
  }
  return out;
}

Strategy parse_strategy(std::string_view text) {
  if (text == "median") return Strategy::Median;
  if (text == "mean") return Strategy::Mean;
  if (text == "constant") return Strategy::Constant;
  throw Error(ErrorCode::BadConfig, "unknown imputation strategy '" + std::string(text) + "'");
}

std::string_view to_string(Strategy strategy) {
  switch (strategy) {
    case Strategy::Median: return "median";
    case Strategy::Mean: return "mean";
    case Strategy::Constant: return "constant";
  }
  return "median";
}

double median(std::vector<double> values) {
  if (values.empty()) return kMissing;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

Imputer fit_imputer(const NumericTable& train, const std::vector<std::string>& columns,
                    Strategy strategy, double constant) {
  Imputer imp;
  imp.strategy = strategy;
  imp.columns = columns;
  for (const auto& name : columns) {
    if (strategy == Strategy::Constant) {
      imp.fill.push_back(constant);
      continue;
    }
    std::vector<double> observed;
    for (double v : train.column(name)) {
      if (!is_missing(v)) observed.push_back(v);
    }
    if (observed.empty()) {
      throw Error(ErrorCode::AllMissingColumn, "column '" + name + "' has no observed training value");
    }
    if (strategy == Strategy::Median) {
      imp.fill.push_back(median(std::move(observed)));
    } else {
      // Sorted so the sum does not depend on row order.
      std::sort(observed.begin(), observed.end());
      imp.fill.push_back(std::accumulate(observed.begin(), observed.end(), 0.0) /
                         static_cast<double>(observed.size()));
    }
  }
  return imp;
}

void Imputer::apply(NumericTable& table) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    for (double& v : table.column(columns[i])) {
      if (is_missing(v)) v = fill[i];
    }
  }
}

std::string Imputer::to_json() const {
  json doc;
  doc["strategy"] = std::string(to_string(strategy));
  doc["columns"] = columns;
  doc["values"] = fill;
  return doc.dump(2) + "\n";
}

Imputer Imputer::from_json(std::string_view text) {
  Imputer imp;
  try {
    const auto doc = json::parse(text);
    imp.strategy = parse_strategy(doc.at("strategy").get<std::string>());
    imp.columns = doc.at("columns").get<std::vector<std::string>>();
    imp.fill = doc.at("values").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadConfig, std::string("imputer file: ") + e.what());
  }
  if (imp.columns.size() != imp.fill.size()) {
    throw Error(ErrorCode::BadConfig, "imputer file: columns and values differ in length");
  }
  return imp;
}

Benchmark build_benchmark(const NumericTable& master, const CleaningConfig& cleaning,
                          const BenchmarkOptions& options, IssueLog& log) {
  Benchmark b;
  b.exclusions = apply_exclusions(master, options.min_age);
  for (auto reason : {ExclusionReason::Minor, ExclusionReason::NoAcuity}) {
    if (auto n = b.exclusions.count(reason)) {
      log.info("Excluded", std::to_string(n) + " visits excluded: " + std::string(to_string(reason)));
    }
  }
  NumericTable kept = master.select_rows(b.exclusions.kept);
  b.cleaning = clean_table(kept, cleaning, log);

  std::vector<std::int64_t> ids;
  for (double v : kept.column("stay_id")) ids.push_back(static_cast<std::int64_t>(v));
  std::vector<int> strata;
  if (options.stratify) {
    for (double v : kept.column(options.stratify_on)) strata.push_back(is_missing(v) ? -1 : static_cast<int>(v));
  }
  b.split = split(ids, options.test_fraction, options.seed, options.stratify ? &strata : nullptr);

  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> test_rows;
  for (std::size_t r = 0; r < ids.size(); ++r) {
    (b.split.at(ids[r]) == Assignment::Test ? test_rows : train_rows).push_back(r);
  }
  b.train = kept.select_rows(train_rows);
  b.test = kept.select_rows(test_rows);

  std::vector<std::string> features;
  for (const auto& name : kept.names()) {
    if (!is_passthrough_column(name)) features.push_back(name);
  }
  b.imputer = fit_imputer(b.train, features, options.strategy, options.constant);
  b.imputer.apply(b.train);
  b.imputer.apply(b.test);
  return b;
}

}  // namespace edbench::clean_split
