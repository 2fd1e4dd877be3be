#include "edbench/cohort.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "edbench/common/csv.hpp"
#include "edbench/common/error.hpp"
#include "edbench/common/parallel.hpp"

namespace edbench::cohort {

using namespace ingest;

int compute_age(const PatientRecord& patient, Timestamp ed_intime) {
  const int shifted = patient.anchor_age + (calendar_year(ed_intime) - patient.anchor_year);
  return std::max({shifted, patient.anchor_age, 0});
}

std::size_t count_prior_events(const std::vector<Timestamp>& event_times, Timestamp t,
                               int window_days) {
  const Timestamp start = t - static_cast<std::int64_t>(window_days) * kSecondsPerDay;
  auto lo = std::lower_bound(event_times.begin(), event_times.end(), start);
  auto hi = std::lower_bound(lo, event_times.end(), t);
  return static_cast<std::size_t>(hi - lo);
}

VitalSigns extract_ed_vitals(const std::vector<VitalSignRecord>& vitals) {
  VitalSigns out;
  std::array<std::optional<Timestamp>, 6> when{};
  auto take = [](std::optional<double>& dst, std::optional<Timestamp>& dst_time,
                 const std::optional<double>& value, Timestamp t) {
    if (!value) return;
    if (!dst_time || t >= *dst_time) {
      dst = value;
      dst_time = t;
    }
  };
  for (const auto& row : vitals) {
    if (!row.charttime) continue;
    const Timestamp t = *row.charttime;
    take(out.temperature, when[0], row.vitals.temperature, t);
    take(out.heartrate, when[1], row.vitals.heartrate, t);
    take(out.resprate, when[2], row.vitals.resprate, t);
    take(out.o2sat, when[3], row.vitals.o2sat, t);
    take(out.sbp, when[4], row.vitals.sbp, t);
    take(out.dbp, when[5], row.vitals.dbp, t);
  }
  return out;
}

std::string normalize_complaint(std::string_view text) {
  std::string out = " ";
  for (char c : text) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u)) {
      out.push_back(static_cast<char>(std::tolower(u)));
    } else if (out.back() != ' ') {
      out.push_back(' ');
    }
  }
  if (out.back() != ' ') out.push_back(' ');
  return out;
}

ComplaintMatcher ComplaintMatcher::parse(std::string_view text) {
  ComplaintMatcher m;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (normalize_complaint(line) == " ") continue;
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) {
      throw Error(ErrorCode::BadConfig, "complaint table line " + std::to_string(line_no) + ": expected 'name: aliases'");
    }
    auto name = normalize_complaint(line.substr(0, colon));
    name = name.substr(1, name.size() - 2);
    std::replace(name.begin(), name.end(), ' ', '_');
    std::vector<std::string> aliases;
    std::string_view rest = line.substr(colon + 1);
    while (true) {
      const auto bar = rest.find('|');
      auto alias = normalize_complaint(rest.substr(0, bar));
      if (alias != " ") aliases.push_back(std::move(alias));
      if (bar == std::string_view::npos) break;
      rest.remove_prefix(bar + 1);
    }
    if (aliases.empty()) {
      throw Error(ErrorCode::BadConfig, "complaint category '" + name + "' has no aliases");
    }
    m.names_.push_back(std::move(name));
    m.aliases_.push_back(std::move(aliases));
  }
  return m;
}

ComplaintMatcher ComplaintMatcher::load(const std::filesystem::path& path) {
  return parse(csv::read_text_file(path));
}

std::filesystem::path ComplaintMatcher::default_path() {
  return std::filesystem::path(EDBENCH_DATA_DIR) / "chief_complaints.txt";
}

const ComplaintMatcher& ComplaintMatcher::shipped() {
  static const ComplaintMatcher matcher = load(default_path());
  return matcher;
}

std::vector<bool> ComplaintMatcher::match(std::string_view text) const {
  std::vector<bool> out(names_.size(), false);
  const auto norm = normalize_complaint(text);
  if (norm == " ") return out;
  for (std::size_t c = 0; c < names_.size(); ++c) {
    for (const auto& alias : aliases_[c]) {
      if (norm.find(alias) != std::string::npos) {
        out[c] = true;
        break;
      }
    }
  }
  return out;
}

bool label_hospitalization(const EdStayRecord& stay, const SubjectData& subject, IssueLog* log) {
  if (!stay.hadm_id) return false;
  if (subject.find_admission(*stay.hadm_id)) return true;
  if (log) {
    log->warn("UnresolvedHadm", "stay " + std::to_string(stay.stay_id) + ": hadm_id " +
                                    std::to_string(*stay.hadm_id) + " not labeled as hospitalization");
  }
  return false;
}

bool label_inpatient_mortality(const AdmissionRecord* admission, const PatientRecord& patient) {
  if (!admission) return false;
  if (admission->deathtime) {
    if (!admission->dischtime || *admission->deathtime <= *admission->dischtime) return true;
  }
  if (patient.dod && admission->dischtime) {
    return start_of_day(*patient.dod) <= start_of_day(*admission->dischtime);
  }
  return false;
}

bool label_icu_transfer_12h(const EdStayRecord& stay, const std::vector<IcuStayRecord>& icu_stays) {
  if (!stay.outtime) return false;
  const Timestamp high = *stay.outtime + 12 * kSecondsPerHour;
  return std::any_of(icu_stays.begin(), icu_stays.end(), [&](const IcuStayRecord& icu) {
    return icu.intime && *icu.intime >= stay.intime && *icu.intime <= high;
  });
}

bool label_ed_reattendance_72h(const EdStayRecord& stay,
                               const std::vector<const EdStayRecord*>& subject_stays) {
  if (!stay.outtime) return false;
  auto it = std::find(subject_stays.begin(), subject_stays.end(), &stay);
  if (it == subject_stays.end()) {
    it = std::find_if(subject_stays.begin(), subject_stays.end(),
                      [&](const EdStayRecord* s) { return s->stay_id == stay.stay_id; });
  }
  if (it == subject_stays.end() || ++it == subject_stays.end()) return false;
  const std::int64_t gap = (*it)->intime - *stay.outtime;
  return gap > 0 && gap <= 72 * kSecondsPerHour;
}

namespace {

struct SubjectTimes {
  std::vector<const EdStayRecord*> stays;
  std::vector<Timestamp> ed;
};

MasterRecord build_one(const LinkedCohort& cohort, const StayData& s, const SubjectTimes& times,
                       const comorbidity::MappingTable& mapping,
                       const ComplaintMatcher& complaints, const MasterOptions& options,
                       IssueLog& log, comorbidity::LookbackStats& lookback) {
  const auto& subject = cohort.subject_of(s);
  const auto& stay = s.stay;
  MasterRecord r;
  r.subject_id = stay.subject_id;
  r.stay_id = stay.stay_id;
  r.hadm_id = stay.hadm_id;
  r.age = compute_age(subject.patient, stay.intime);
  r.gender = subject.patient.gender;

  const auto index_hadm = stay.hadm_id;
  std::vector<Timestamp> hosp;
  for (const auto& a : subject.admissions) {
    if (a.admittime && !(index_hadm && a.hadm_id == *index_hadm)) hosp.push_back(*a.admittime);
  }
  std::vector<Timestamp> icu;
  for (const auto& i : subject.icu_stays) {
    if (i.intime && !(index_hadm && i.hadm_id && *i.hadm_id == *index_hadm)) icu.push_back(*i.intime);
  }
  std::sort(hosp.begin(), hosp.end());
  std::sort(icu.begin(), icu.end());
  for (std::size_t w = 0; w < kHistoryWindowsDays.size(); ++w) {
    r.n_ed[w] = static_cast<int>(count_prior_events(times.ed, stay.intime, kHistoryWindowsDays[w]));
    r.n_hosp[w] = static_cast<int>(count_prior_events(hosp, stay.intime, kHistoryWindowsDays[w]));
    r.n_icu[w] = static_cast<int>(count_prior_events(icu, stay.intime, kHistoryWindowsDays[w]));
  }

  const auto codes = comorbidity::collect_codes_in_lookback(
      subject.diagnoses, subject.admissions, stay.intime, index_hadm, options.lookback, &lookback);
  r.cci = comorbidity::map_to_cci(mapping, codes);
  r.eci = comorbidity::map_to_eci(mapping, codes);

  if (s.triage) {
    r.triage_acuity = s.triage->acuity;
    r.triage = s.triage->vitals;
    r.triage_pain = s.triage->pain;
    r.chiefcom = complaints.match(s.triage->chiefcomplaint);
  } else {
    r.chiefcom.assign(complaints.categories().size(), false);
  }

  r.ed = extract_ed_vitals(s.vitals);
  const Timestamp out = stay.outtime.value_or(stay.intime);
  r.ed_los = std::max(0.0, hours_between(stay.intime, out));
  if (out < stay.intime) {
    log.warn("NegativeLengthOfStay", "stay " + std::to_string(stay.stay_id) + ": ed_los clamped to 0");
  }
  r.n_med = static_cast<int>(s.pyxis.size());
  r.n_medrecon = static_cast<int>(s.medrecon.size());

  r.outcome_hospitalization = label_hospitalization(stay, subject);
  const AdmissionRecord* admission =
      r.outcome_hospitalization ? subject.find_admission(*stay.hadm_id) : nullptr;
  r.outcome_inhospital_mortality = label_inpatient_mortality(admission, subject.patient);
  r.outcome_icu_transfer_12h = label_icu_transfer_12h(stay, subject.icu_stays);
  r.outcome_critical = label_critical(r.outcome_inhospital_mortality, r.outcome_icu_transfer_12h);
  r.outcome_ed_revisit_3d = label_ed_reattendance_72h(stay, times.stays);
  return r;
}

}  // namespace

std::vector<MasterRecord> build_master(const LinkedCohort& cohort,
                                       const comorbidity::MappingTable& mapping,
                                       const ComplaintMatcher& complaints,
                                       const MasterOptions& options, IssueLog& log,
                                       MasterStats* stats) {
  std::map<std::int64_t, SubjectTimes> times;
  for (const auto& [id, subject] : cohort.subjects) {
    auto& t = times[id];
    for (auto i : subject.stays) {
      t.stays.push_back(&cohort.stays[i].stay);
      t.ed.push_back(cohort.stays[i].stay.intime);
    }
  }

  std::vector<MasterRecord> records(cohort.stays.size());
  std::vector<comorbidity::LookbackStats> lookback(cohort.stays.size());
  parallel_for(cohort.stays.size(), options.threads, [&](std::size_t i) {
    const auto& s = cohort.stays[i];
    records[i] = build_one(cohort, s, times.at(s.stay.subject_id), mapping, complaints, options,
                           log, lookback[i]);
  });

  if (stats) {
    stats->records = records.size();
    stats->subjects = cohort.subjects.size();
    for (const auto& l : lookback) {
      stats->lookback.unresolved_hadm += l.unresolved_hadm;
      stats->lookback.unknown_version += l.unknown_version;
    }
  }
  std::size_t unknown = 0;
  for (const auto& l : lookback) unknown += l.unknown_version;
  if (unknown > 0) {
    log.warn("UnknownIcdVersion", std::to_string(unknown) + " lookback diagnoses skipped for their ICD version");
  }
  return records;
}

namespace {

const char* const kVitalNames[] = {"temperature", "heartrate", "resprate", "o2sat", "sbp", "dbp"};

void push_vitals(std::vector<double>& row, const VitalSigns& v) {
  for (const auto* f : {&v.temperature, &v.heartrate, &v.resprate, &v.o2sat, &v.sbp, &v.dbp}) {
    row.push_back(value_or_missing(*f));
  }
}

}  // namespace

std::vector<std::string> master_columns(const comorbidity::MappingTable& mapping,
                                        const ComplaintMatcher& complaints) {
  std::vector<std::string> cols{"subject_id", "stay_id", "hadm_id", "age", "gender"};
  for (const char* kind : {"ed", "hosp", "icu"}) {
    for (int w : kHistoryWindowsDays) {
      cols.push_back(std::string("n_") + kind + "_" + std::to_string(w) + "d");
    }
  }
  for (const auto& f : mapping.fields(comorbidity::Index::Cci)) cols.push_back(f.name);
  for (const auto& f : mapping.fields(comorbidity::Index::Eci)) cols.push_back(f.name);
  cols.push_back("triage_acuity");
  for (const char* v : kVitalNames) cols.push_back(std::string("triage_") + v);
  cols.push_back("triage_pain");
  for (const auto& c : complaints.categories()) cols.push_back("chiefcom_" + c);
  for (const char* v : kVitalNames) cols.push_back(std::string("ed_") + v);
  cols.push_back("ed_los");
  cols.push_back("n_med");
  cols.push_back("n_medrecon");
  for (auto o : kOutcomeColumns) cols.emplace_back(o);
  return cols;
}

NumericTable to_table(const std::vector<MasterRecord>& records,
                      const comorbidity::MappingTable& mapping,
                      const ComplaintMatcher& complaints) {
  NumericTable table(master_columns(mapping, complaints));
  std::vector<double> row;
  for (const auto& r : records) {
    row.clear();
    row.push_back(static_cast<double>(r.subject_id));
    row.push_back(static_cast<double>(r.stay_id));
    row.push_back(r.hadm_id ? static_cast<double>(*r.hadm_id) : kMissing);
    row.push_back(r.age);
    row.push_back(r.gender == Gender::Female ? 1.0 : r.gender == Gender::Male ? 0.0 : kMissing);
    for (const auto* counts : {&r.n_ed, &r.n_hosp, &r.n_icu}) {
      for (int c : *counts) row.push_back(c);
    }
    for (int v : r.cci) row.push_back(v);
    for (int v : r.eci) row.push_back(v);
    row.push_back(r.triage_acuity ? *r.triage_acuity : kMissing);
    push_vitals(row, r.triage);
    row.push_back(value_or_missing(r.triage_pain));
    for (bool b : r.chiefcom) row.push_back(b ? 1.0 : 0.0);
    push_vitals(row, r.ed);
    row.push_back(r.ed_los);
    row.push_back(r.n_med);
    row.push_back(r.n_medrecon);
    for (bool b : {r.outcome_hospitalization, r.outcome_inhospital_mortality,
                   r.outcome_icu_transfer_12h, r.outcome_critical, r.outcome_ed_revisit_3d}) {
      row.push_back(b ? 1.0 : 0.0);
    }
    table.add_row(row);
  }
  return table;
}

}  // namespace edbench::cohort
