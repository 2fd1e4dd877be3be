#include "edbench/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <set>
#include <tuple>
#include <unordered_map>

#include "edbench/common/csv.hpp"
#include "edbench/common/error.hpp"

namespace edbench::ingest {

TemperatureUnit parse_temperature_unit(std::string_view text) {
  if (text == "fahrenheit" || text == "F") return TemperatureUnit::Fahrenheit;
  if (text == "celsius" || text == "C") return TemperatureUnit::Celsius;
  throw Error(ErrorCode::BadConfig, "unknown temperature unit '" + std::string(text) + "'");
}

double convert_temperature(double value, TemperatureUnit unit) {
  if (unit == TemperatureUnit::Fahrenheit) return (value - 32.0) * 5.0 / 9.0;
  return value;
}

std::string_view to_string(Gender gender) {
  switch (gender) {
    case Gender::Female: return "F";
    case Gender::Male: return "M";
    case Gender::Unknown: return "";
  }
  return "";
}

std::string_view file_name(TableKind kind) {
  switch (kind) {
    case TableKind::EdStays: return "edstays.csv";
    case TableKind::Triage: return "triage.csv";
    case TableKind::VitalSign: return "vitalsign.csv";
    case TableKind::Patients: return "patients.csv";
    case TableKind::Admissions: return "admissions.csv";
    case TableKind::IcuStays: return "icustays.csv";
    case TableKind::Diagnoses: return "diagnoses_icd.csv";
    case TableKind::Medrecon: return "medrecon.csv";
    case TableKind::Pyxis: return "pyxis.csv";
  }
  return "";
}

const std::vector<std::string>& required_columns(TableKind kind) {
  static const std::vector<std::string> edstays{"subject_id", "hadm_id", "stay_id", "intime",
                                                "outtime", "disposition"};
  static const std::vector<std::string> triage{
      "subject_id", "stay_id", "temperature", "heartrate", "resprate", "o2sat",
      "sbp",        "dbp",     "pain",        "acuity",    "chiefcomplaint"};
  static const std::vector<std::string> vitalsign{"subject_id", "stay_id", "charttime",
                                                  "temperature", "heartrate", "resprate",
                                                  "o2sat",      "sbp",     "dbp"};
  static const std::vector<std::string> patients{"subject_id", "gender", "anchor_age",
                                                 "anchor_year", "dod"};
  static const std::vector<std::string> admissions{"subject_id", "hadm_id", "admittime",
                                                   "dischtime", "deathtime"};
  static const std::vector<std::string> icustays{"subject_id", "hadm_id", "stay_id", "intime",
                                                 "outtime"};
  static const std::vector<std::string> diagnoses{"subject_id", "hadm_id", "seq_num",
                                                  "icd_code", "icd_version"};
  static const std::vector<std::string> medrecon{"subject_id", "stay_id", "charttime", "name"};
  static const std::vector<std::string> pyxis{"subject_id", "stay_id", "charttime", "name"};
  switch (kind) {
    case TableKind::EdStays: return edstays;
    case TableKind::Triage: return triage;
    case TableKind::VitalSign: return vitalsign;
    case TableKind::Patients: return patients;
    case TableKind::Admissions: return admissions;
    case TableKind::IcuStays: return icustays;
    case TableKind::Diagnoses: return diagnoses;
    case TableKind::Medrecon: return medrecon;
    case TableKind::Pyxis: return pyxis;
  }
  return edstays;
}

std::optional<double> parse_pain(std::string_view text) {
  auto value = csv::parse_double(text);
  if (!value || *value < 0.0 || *value > 10.0 || std::floor(*value) != *value) {
    return std::nullopt;
  }
  return *value;
}

namespace {

/// Field access for one data row, in required-column order.
class Row {
 public:
  Row(const csv::Document& doc, const std::vector<std::size_t>& index, std::size_t row,
      IssueLog& log, std::string_view source)
      : doc_(doc), index_(index), row_(row), log_(log), source_(source) {}

  std::string_view text(std::size_t k) const { return doc_.rows[row_][index_[k]]; }

  std::string where(std::size_t k) const {
    return std::string(source_) + " line " + std::to_string(doc_.line_numbers[row_]) +
           " column " + doc_.header[index_[k]];
  }

  std::optional<double> number(std::size_t k) const {
    const auto t = text(k);
    auto v = csv::parse_double(t);
    if (!v && !t.empty()) log_.warn("UnparseableNumber", where(k) + ": '" + std::string(t) + "'");
    return v;
  }

  std::optional<std::int64_t> integer(std::size_t k) const {
    const auto t = text(k);
    auto v = csv::parse_integer(t);
    if (!v && !t.empty()) log_.warn("UnparseableNumber", where(k) + ": '" + std::string(t) + "'");
    return v;
  }

  std::optional<Timestamp> time(std::size_t k, bool root) const {
    const auto t = text(k);
    if (t.empty()) return std::nullopt;
    auto v = parse_timestamp(t);
    if (!v) {
      if (root) throw Error(ErrorCode::BadTimestamp, where(k) + ": '" + std::string(t) + "'");
      log_.warn("BadTimestamp", where(k) + ": '" + std::string(t) + "'");
    }
    return v;
  }

  IssueLog& log() const { return log_; }

 private:
  const csv::Document& doc_;
  const std::vector<std::size_t>& index_;
  std::size_t row_;
  IssueLog& log_;
  std::string_view source_;
};

template <class Record>
std::optional<Record> parse_row(const Row& row, const ParseOptions& options);

std::optional<double> temperature(const Row& row, std::size_t k, const ParseOptions& options) {
  auto v = row.number(k);
  if (v) v = convert_temperature(*v, options.temperature_unit);
  return v;
}

VitalSigns vitals_at(const Row& row, std::size_t first, const ParseOptions& options) {
  VitalSigns v;
  v.temperature = temperature(row, first, options);
  v.heartrate = row.number(first + 1);
  v.resprate = row.number(first + 2);
  v.o2sat = row.number(first + 3);
  v.sbp = row.number(first + 4);
  v.dbp = row.number(first + 5);
  return v;
}

/// Child-table rows without a usable key cannot be attached anywhere.
bool require_key(const Row& row, std::size_t k, const std::optional<std::int64_t>& key) {
  if (key) return true;
  row.log().warn("MissingKey", row.where(k) + ": row dropped");
  return false;
}

template <>
std::optional<EdStayRecord> parse_row(const Row& row, const ParseOptions&) {
  EdStayRecord r;
  auto subject = row.integer(0);
  auto stay = row.integer(2);
  if (!subject || !stay) throw Error(ErrorCode::MalformedRow, row.where(subject ? 2 : 0) + ": missing identifier");
  r.subject_id = *subject;
  r.stay_id = *stay;
  r.hadm_id = row.integer(1);
  auto intime = row.time(3, true);
  if (!intime) throw Error(ErrorCode::BadTimestamp, row.where(3) + ": intime is required");
  r.intime = *intime;
  r.outtime = row.time(4, true);
  r.disposition = std::string(row.text(5));
  if (r.outtime && *r.outtime < r.intime) {
    row.log().warn("InvertedStay", row.where(4) + ": outtime before intime for stay " +
                                       std::to_string(r.stay_id));
  }
  return r;
}

template <>
std::optional<TriageRecord> parse_row(const Row& row, const ParseOptions& options) {
  TriageRecord r;
  auto stay = row.integer(1);
  if (!require_key(row, 1, stay)) return std::nullopt;
  r.subject_id = row.integer(0).value_or(0);
  r.stay_id = *stay;
  r.vitals = vitals_at(row, 2, options);
  r.pain = parse_pain(row.text(8));
  if (!r.pain && !row.text(8).empty()) row.log().info("PainMissing", row.where(8) + ": '" + std::string(row.text(8)) + "'");
  if (auto acuity = row.number(9)) {
    if (*acuity >= 1 && *acuity <= 5 && std::floor(*acuity) == *acuity) {
      r.acuity = static_cast<int>(*acuity);
    } else {
      row.log().warn("BadAcuity", row.where(9) + ": " + std::string(row.text(9)));
    }
  }
  r.chiefcomplaint = std::string(row.text(10));
  return r;
}

template <>
std::optional<VitalSignRecord> parse_row(const Row& row, const ParseOptions& options) {
  VitalSignRecord r;
  auto stay = row.integer(1);
  if (!require_key(row, 1, stay)) return std::nullopt;
  r.subject_id = row.integer(0).value_or(0);
  r.stay_id = *stay;
  r.charttime = row.time(2, false);
  r.vitals = vitals_at(row, 3, options);
  return r;
}

template <>
std::optional<PatientRecord> parse_row(const Row& row, const ParseOptions&) {
  PatientRecord r;
  auto subject = row.integer(0);
  if (!require_key(row, 0, subject)) return std::nullopt;
  r.subject_id = *subject;
  const auto g = row.text(1);
  r.gender = g == "F" ? Gender::Female : g == "M" ? Gender::Male : Gender::Unknown;
  auto age = row.integer(2);
  if (!age || *age < 0) {
    row.log().warn("BadAnchorAge", row.where(2) + ": patient dropped");
    return std::nullopt;
  }
  r.anchor_age = static_cast<int>(*age);
  r.anchor_year = static_cast<int>(row.integer(3).value_or(0));
  r.dod = row.time(4, false);
  return r;
}

template <>
std::optional<AdmissionRecord> parse_row(const Row& row, const ParseOptions&) {
  AdmissionRecord r;
  auto subject = row.integer(0);
  auto hadm = row.integer(1);
  if (!require_key(row, 0, subject) || !require_key(row, 1, hadm)) return std::nullopt;
  r.subject_id = *subject;
  r.hadm_id = *hadm;
  r.admittime = row.time(2, false);
  r.dischtime = row.time(3, false);
  r.deathtime = row.time(4, false);
  if (r.admittime && r.dischtime && *r.dischtime < *r.admittime) {
    row.log().warn("InvertedAdmission", row.where(3) + ": dischtime before admittime");
  }
  return r;
}

template <>
std::optional<IcuStayRecord> parse_row(const Row& row, const ParseOptions&) {
  IcuStayRecord r;
  auto subject = row.integer(0);
  auto icu = row.integer(2);
  if (!require_key(row, 0, subject) || !require_key(row, 2, icu)) return std::nullopt;
  r.subject_id = *subject;
  r.hadm_id = row.integer(1);
  r.icu_stay_id = *icu;
  r.intime = row.time(3, false);
  r.outtime = row.time(4, false);
  return r;
}

template <>
std::optional<DiagnosisRecord> parse_row(const Row& row, const ParseOptions&) {
  DiagnosisRecord r;
  auto subject = row.integer(0);
  auto hadm = row.integer(1);
  if (!require_key(row, 0, subject) || !require_key(row, 1, hadm)) return std::nullopt;
  r.subject_id = *subject;
  r.hadm_id = *hadm;
  r.seq_num = static_cast<int>(row.integer(2).value_or(0));
  r.icd_code = std::string(row.text(3));
  if (r.icd_code.empty()) {
    row.log().warn("EmptyIcdCode", row.where(3) + ": row dropped");
    return std::nullopt;
  }
  r.icd_version = static_cast<int>(row.integer(4).value_or(0));
  if (r.icd_version != 9 && r.icd_version != 10) {
    row.log().warn("UnknownIcdVersion", row.where(4) + ": '" + std::string(row.text(4)) + "'");
  }
  return r;
}

template <>
std::optional<MedreconRecord> parse_row(const Row& row, const ParseOptions&) {
  MedreconRecord r;
  auto stay = row.integer(1);
  if (!require_key(row, 1, stay)) return std::nullopt;
  r.subject_id = row.integer(0).value_or(0);
  r.stay_id = *stay;
  r.charttime = row.time(2, false);
  r.name = std::string(row.text(3));
  return r;
}

template <>
std::optional<PyxisRecord> parse_row(const Row& row, const ParseOptions&) {
  PyxisRecord r;
  auto stay = row.integer(1);
  if (!require_key(row, 1, stay)) return std::nullopt;
  r.subject_id = row.integer(0).value_or(0);
  r.stay_id = *stay;
  r.charttime = row.time(2, false);
  r.name = std::string(row.text(3));
  return r;
}

std::string num(const std::optional<double>& v) { return v ? csv::format_number(*v) : ""; }
std::string num(const std::optional<std::int64_t>& v) { return v ? std::to_string(*v) : ""; }
std::string num(const std::optional<int>& v) { return v ? std::to_string(*v) : ""; }
std::string when(const std::optional<Timestamp>& t) { return t ? format_timestamp(*t) : ""; }

std::string temperature_text(const std::optional<double>& celsius, const ParseOptions& options) {
  if (!celsius) return "";
  double v = *celsius;
  if (options.temperature_unit == TemperatureUnit::Fahrenheit) {
    v = std::round((v * 9.0 / 5.0 + 32.0) * 1e6) / 1e6;
  }
  return csv::format_number(v);
}

void append_vitals(std::vector<std::string>& out, const VitalSigns& v, const ParseOptions& options) {
  out.push_back(temperature_text(v.temperature, options));
  out.push_back(num(v.heartrate));
  out.push_back(num(v.resprate));
  out.push_back(num(v.o2sat));
  out.push_back(num(v.sbp));
  out.push_back(num(v.dbp));
}

std::vector<std::string> to_row(const EdStayRecord& r, const ParseOptions&) {
  return {std::to_string(r.subject_id), num(r.hadm_id), std::to_string(r.stay_id),
          format_timestamp(r.intime), when(r.outtime), r.disposition};
}

std::vector<std::string> to_row(const TriageRecord& r, const ParseOptions& options) {
  std::vector<std::string> out{std::to_string(r.subject_id), std::to_string(r.stay_id)};
  append_vitals(out, r.vitals, options);
  out.push_back(num(r.pain));
  out.push_back(num(r.acuity));
  out.push_back(r.chiefcomplaint);
  return out;
}

std::vector<std::string> to_row(const VitalSignRecord& r, const ParseOptions& options) {
  std::vector<std::string> out{std::to_string(r.subject_id), std::to_string(r.stay_id),
                               when(r.charttime)};
  append_vitals(out, r.vitals, options);
  return out;
}

std::vector<std::string> to_row(const PatientRecord& r, const ParseOptions&) {
  return {std::to_string(r.subject_id), std::string(to_string(r.gender)),
          std::to_string(r.anchor_age), std::to_string(r.anchor_year),
          r.dod ? format_date(*r.dod) : ""};
}

std::vector<std::string> to_row(const AdmissionRecord& r, const ParseOptions&) {
  return {std::to_string(r.subject_id), std::to_string(r.hadm_id), when(r.admittime),
          when(r.dischtime), when(r.deathtime)};
}

std::vector<std::string> to_row(const IcuStayRecord& r, const ParseOptions&) {
  return {std::to_string(r.subject_id), num(r.hadm_id), std::to_string(r.icu_stay_id),
          when(r.intime), when(r.outtime)};
}

std::vector<std::string> to_row(const DiagnosisRecord& r, const ParseOptions&) {
  return {std::to_string(r.subject_id), std::to_string(r.hadm_id), std::to_string(r.seq_num),
          r.icd_code, std::to_string(r.icd_version)};
}

std::vector<std::string> to_row(const MedreconRecord& r, const ParseOptions&) {
  return {std::to_string(r.subject_id), std::to_string(r.stay_id), when(r.charttime), r.name};
}

std::vector<std::string> to_row(const PyxisRecord& r, const ParseOptions&) {
  return {std::to_string(r.subject_id), std::to_string(r.stay_id), when(r.charttime), r.name};
}

}  // namespace

template <class Record>
std::vector<Record> parse_table_text(std::string_view text, const ParseOptions& options,
                                     IssueLog& log, std::string_view source) {
  const TableKind kind = TableTraits<Record>::kind;
  const std::string label = source.empty() ? std::string(file_name(kind)) : std::string(source);
  const auto doc = csv::parse(text);
  if (doc.header.empty()) throw Error(ErrorCode::MissingColumn, label + ": header row missing");

  const auto& required = required_columns(kind);
  std::vector<std::size_t> index;
  for (const auto& name : required) {
    auto c = doc.column(name);
    if (!c) throw Error(ErrorCode::MissingColumn, label + ": required column '" + name + "' absent");
    index.push_back(*c);
  }

  std::vector<Record> records;
  records.reserve(doc.rows.size());
  for (std::size_t r = 0; r < doc.rows.size(); ++r) {
    if (doc.rows[r].size() != doc.header.size()) {
      throw Error(ErrorCode::MalformedRow,
                  label + " line " + std::to_string(doc.line_numbers[r]) + ": expected " +
                      std::to_string(doc.header.size()) + " fields, found " +
                      std::to_string(doc.rows[r].size()));
    }
    Row row(doc, index, r, log, label);
    if (auto rec = parse_row<Record>(row, options)) records.push_back(std::move(*rec));
  }
  return records;
}

template <class Record>
std::vector<Record> parse_table(const std::filesystem::path& path, const ParseOptions& options,
                                IssueLog& log) {
  return parse_table_text<Record>(csv::read_text_file(path), options, log, path.string());
}

template <class Record>
std::string serialize_table(const std::vector<Record>& records, const ParseOptions& options) {
  csv::Writer writer(required_columns(TableTraits<Record>::kind));
  for (const auto& r : records) writer.add_row(to_row(r, options));
  return writer.str();
}

#define EDBENCH_INSTANTIATE_TABLE(Record)                                                    \
  template std::vector<Record> parse_table_text<Record>(std::string_view, const ParseOptions&, \
                                                        IssueLog&, std::string_view);        \
  template std::vector<Record> parse_table<Record>(const std::filesystem::path&,             \
                                                   const ParseOptions&, IssueLog&);          \
  template std::string serialize_table<Record>(const std::vector<Record>&, const ParseOptions&);

EDBENCH_INSTANTIATE_TABLE(EdStayRecord)
EDBENCH_INSTANTIATE_TABLE(TriageRecord)
EDBENCH_INSTANTIATE_TABLE(VitalSignRecord)
EDBENCH_INSTANTIATE_TABLE(PatientRecord)
EDBENCH_INSTANTIATE_TABLE(AdmissionRecord)
EDBENCH_INSTANTIATE_TABLE(IcuStayRecord)
EDBENCH_INSTANTIATE_TABLE(DiagnosisRecord)
EDBENCH_INSTANTIATE_TABLE(MedreconRecord)
EDBENCH_INSTANTIATE_TABLE(PyxisRecord)
#undef EDBENCH_INSTANTIATE_TABLE

void check_input_files(const std::filesystem::path& dir) {
  std::string missing;
  for (auto kind : kAllTables) {
    if (!std::filesystem::is_regular_file(dir / file_name(kind))) {
      if (!missing.empty()) missing += ", ";
      missing += file_name(kind);
    }
  }
  if (!missing.empty()) {
    throw Error(ErrorCode::MissingFile, "input directory " + dir.string() + " lacks " + missing);
  }
}

RawTables read_raw_tables(const std::filesystem::path& dir, const ParseOptions& options,
                          IssueLog& log, unsigned threads) {
  check_input_files(dir);
  RawTables t;
  auto policy = threads > 1 ? std::launch::async : std::launch::deferred;
  auto load = [&](auto& out) {
    using Record = typename std::decay_t<decltype(out)>::value_type;
    return std::async(policy, [&] {
      out = parse_table<Record>(dir / file_name(TableTraits<Record>::kind), options, log);
    });
  };
  std::vector<std::future<void>> jobs;
  jobs.push_back(load(t.edstays));
  jobs.push_back(load(t.triage));
  jobs.push_back(load(t.vitalsign));
  jobs.push_back(load(t.patients));
  jobs.push_back(load(t.admissions));
  jobs.push_back(load(t.icustays));
  jobs.push_back(load(t.diagnoses));
  jobs.push_back(load(t.medrecon));
  jobs.push_back(load(t.pyxis));
  for (auto& job : jobs) job.get();
  return t;
}

void write_raw_tables(const std::filesystem::path& dir, const RawTables& t,
                      const ParseOptions& options) {
  auto write = [&](const auto& records) {
    using Record = typename std::decay_t<decltype(records)>::value_type;
    csv::write_text_file(dir / file_name(TableTraits<Record>::kind),
                         serialize_table(records, options));
  };
  write(t.edstays);
  write(t.triage);
  write(t.vitalsign);
  write(t.patients);
  write(t.admissions);
  write(t.icustays);
  write(t.diagnoses);
  write(t.medrecon);
  write(t.pyxis);
}

const AdmissionRecord* SubjectData::find_admission(std::int64_t hadm_id) const {
  for (const auto& a : admissions) {
    if (a.hadm_id == hadm_id) return &a;
  }
  return nullptr;
}

const SubjectData& LinkedCohort::subject_of(const StayData& stay) const {
  return subjects.at(stay.stay.subject_id);
}

namespace {

auto vital_key(const VitalSigns& v) {
  return std::tuple(v.temperature, v.heartrate, v.resprate, v.o2sat, v.sbp, v.dbp);
}

template <class Record, class KeyFn>
void check_unique(const std::vector<Record>& records, KeyFn key, std::string_view what) {
  std::set<std::int64_t> seen;
  for (const auto& r : records) {
    if (!seen.insert(key(r)).second) {
      throw Error(ErrorCode::DuplicateKey,
                  std::string(what) + " " + std::to_string(key(r)) + " appears more than once");
    }
  }
}

}  // namespace

LinkedCohort link_tables(RawTables t, IssueLog& log) {
  check_unique(t.edstays, [](const EdStayRecord& r) { return r.stay_id; }, "stay_id");
  check_unique(t.patients, [](const PatientRecord& r) { return r.subject_id; }, "subject_id");
  check_unique(t.admissions, [](const AdmissionRecord& r) { return r.hadm_id; }, "hadm_id");
  check_unique(t.icustays, [](const IcuStayRecord& r) { return r.icu_stay_id; }, "icu stay_id");

  LinkedCohort cohort;
  cohort.stats.input_stays = t.edstays.size();

  std::unordered_map<std::int64_t, const PatientRecord*> patients;
  for (const auto& p : t.patients) patients.emplace(p.subject_id, &p);

  std::sort(t.edstays.begin(), t.edstays.end(),
            [](const auto& a, const auto& b) { return a.stay_id < b.stay_id; });
  for (auto& stay : t.edstays) {
    if (!patients.count(stay.subject_id)) {
      ++cohort.stats.dropped_missing_patient;
      log.warn("MissingPatient", "stay " + std::to_string(stay.stay_id) + ": subject " +
                                     std::to_string(stay.subject_id) + " has no patient row");
      continue;
    }
    if (!stay.outtime) {
      ++cohort.stats.dropped_missing_outtime;
      log.warn("MissingOuttime", "stay " + std::to_string(stay.stay_id) + " excluded: no outtime");
      continue;
    }
    if (*stay.outtime < stay.intime) ++cohort.stats.inverted_stays;
    cohort.stays.push_back(StayData{std::move(stay), {}, {}, {}, {}});
  }

  std::unordered_map<std::int64_t, std::size_t> by_stay;
  for (std::size_t i = 0; i < cohort.stays.size(); ++i) by_stay.emplace(cohort.stays[i].stay.stay_id, i);

  auto attach = [&](auto& rows, std::size_t& orphan_count, std::string_view table, auto&& put) {
    for (auto& row : rows) {
      auto it = by_stay.find(row.stay_id);
      if (it == by_stay.end()) {
        ++orphan_count;
        log.warn("OrphanRow", std::string(table) + " row for unknown stay " + std::to_string(row.stay_id));
        continue;
      }
      put(cohort.stays[it->second], std::move(row));
    }
  };

  // Triage rows are ordered first so that "keep the first duplicate" does not
  // depend on input order.
  std::sort(t.triage.begin(), t.triage.end(), [](const TriageRecord& a, const TriageRecord& b) {
    return std::tie(a.stay_id, a.chiefcomplaint) < std::tie(b.stay_id, b.chiefcomplaint) ||
           (std::tie(a.stay_id, a.chiefcomplaint) == std::tie(b.stay_id, b.chiefcomplaint) &&
            std::tuple(vital_key(a.vitals), a.pain, a.acuity) <
                std::tuple(vital_key(b.vitals), b.pain, b.acuity));
  });
  attach(t.triage, cohort.stats.orphan_triage, "triage", [&](StayData& s, TriageRecord&& r) {
    if (s.triage) {
      ++cohort.stats.duplicate_triage;
      log.warn("DuplicateTriage", "stay " + std::to_string(r.stay_id) + ": extra triage row ignored");
      return;
    }
    s.triage = std::move(r);
  });
  attach(t.vitalsign, cohort.stats.orphan_vitalsign, "vitalsign",
         [](StayData& s, VitalSignRecord&& r) { s.vitals.push_back(std::move(r)); });
  attach(t.medrecon, cohort.stats.orphan_medrecon, "medrecon",
         [](StayData& s, MedreconRecord&& r) { s.medrecon.push_back(std::move(r)); });
  attach(t.pyxis, cohort.stats.orphan_pyxis, "pyxis",
         [](StayData& s, PyxisRecord&& r) { s.pyxis.push_back(std::move(r)); });

  for (auto& s : cohort.stays) {
    std::sort(s.vitals.begin(), s.vitals.end(), [](const auto& a, const auto& b) {
      return std::tuple(a.charttime, vital_key(a.vitals)) < std::tuple(b.charttime, vital_key(b.vitals));
    });
    std::sort(s.medrecon.begin(), s.medrecon.end(), [](const auto& a, const auto& b) {
      return std::tie(a.charttime, a.name) < std::tie(b.charttime, b.name);
    });
    std::sort(s.pyxis.begin(), s.pyxis.end(), [](const auto& a, const auto& b) {
      return std::tie(a.charttime, a.name) < std::tie(b.charttime, b.name);
    });
    const Timestamp low = s.stay.intime - kSecondsPerHour;
    const Timestamp high = *s.stay.outtime + kSecondsPerHour;
    for (const auto& v : s.vitals) {
      if (v.charttime && (*v.charttime < low || *v.charttime > high)) {
        ++cohort.stats.vitals_outside_window;
        log.warn("VitalOutsideStay", "stay " + std::to_string(s.stay.stay_id) + ": charttime " +
                                         format_timestamp(*v.charttime) + " outside the ED stay");
      }
    }
  }

  // Subject indices for every subject with at least one root stay.
  for (std::size_t i = 0; i < cohort.stays.size(); ++i) {
    const auto subject = cohort.stays[i].stay.subject_id;
    auto [it, inserted] = cohort.subjects.try_emplace(subject);
    if (inserted) it->second.patient = *patients.at(subject);
    it->second.stays.push_back(i);
  }
  for (auto& a : t.admissions) {
    if (auto it = cohort.subjects.find(a.subject_id); it != cohort.subjects.end()) {
      it->second.admissions.push_back(std::move(a));
    }
  }
  for (auto& icu : t.icustays) {
    if (auto it = cohort.subjects.find(icu.subject_id); it != cohort.subjects.end()) {
      it->second.icu_stays.push_back(std::move(icu));
    }
  }
  for (auto& d : t.diagnoses) {
    if (auto it = cohort.subjects.find(d.subject_id); it != cohort.subjects.end()) {
      it->second.diagnoses.push_back(std::move(d));
    }
  }
  for (auto& [subject, data] : cohort.subjects) {
    std::sort(data.stays.begin(), data.stays.end(), [&](std::size_t a, std::size_t b) {
      const auto& sa = cohort.stays[a].stay;
      const auto& sb = cohort.stays[b].stay;
      return std::tie(sa.intime, sa.stay_id) < std::tie(sb.intime, sb.stay_id);
    });
    std::sort(data.admissions.begin(), data.admissions.end(), [](const auto& a, const auto& b) {
      return std::tie(a.admittime, a.hadm_id) < std::tie(b.admittime, b.hadm_id);
    });
    std::sort(data.icu_stays.begin(), data.icu_stays.end(), [](const auto& a, const auto& b) {
      return std::tie(a.intime, a.icu_stay_id) < std::tie(b.intime, b.icu_stay_id);
    });
    std::sort(data.diagnoses.begin(), data.diagnoses.end(), [](const auto& a, const auto& b) {
      return std::tie(a.hadm_id, a.seq_num, a.icd_version, a.icd_code) <
             std::tie(b.hadm_id, b.seq_num, b.icd_version, b.icd_code);
    });
  }

  for (const auto& s : cohort.stays) {
    if (!s.stay.hadm_id) continue;
    if (!cohort.subjects.at(s.stay.subject_id).find_admission(*s.stay.hadm_id)) {
      ++cohort.stats.unresolved_hadm;
      log.warn("UnresolvedHadm", "stay " + std::to_string(s.stay.stay_id) + ": hadm_id " +
                                     std::to_string(*s.stay.hadm_id) + " has no admission row");
    }
  }
  return cohort;
}

}  // namespace edbench::ingest
