#include "edbench/synthdata.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <json.hpp>

#include "edbench/common/csv.hpp"
#include "edbench/common/error.hpp"
#include "edbench/common/random.hpp"
#include "edbench/comorbidity.hpp"

namespace edbench::synthdata {

using ingest::VitalSigns;

namespace {

constexpr double kHour = 1.0;
constexpr double kDay = 24.0;

enum Group { kDischarged = 0, kHospitalized = 1, kCritical = 2 };

struct Visit {
  std::size_t patient = 0;
  bool hospitalized = false;
  bool icu = false;
  bool mortality = false;
  bool revisit = false;  // next visit starts within 72 h of this one ending
  bool final = false;
  Timestamp in{};
  Timestamp out{};
  std::int64_t stay_id = 0;
  std::optional<std::int64_t> hadm_id;
  Group group() const { return icu || mortality ? kCritical : hospitalized ? kHospitalized : kDischarged; }
};

// ESI level 1..5 shares per group.
constexpr std::array<std::array<double, 5>, 3> kAcuity = {{
    {2.3, 19.5, 65.3, 12.3, 0.5},
    {5.0, 46.0, 47.0, 1.6, 0.4},  // hospitalized, not critical
    {33.9, 53.9, 12.1, 0.1, 0.0},
}};

struct Complaint {
  std::array<const char*, 3> forms;
  std::array<double, 3> weight;  // percent of visits per group
};

const std::vector<Complaint>& complaints() {
  static const std::vector<Complaint> list = {
      {{"Chest pain", "CP", "Chest pressure"}, {5.9, 8.1, 4.2}},
      {{"Abd pain", "ABDOMINAL PAIN", "Epigastric pain"}, {11.1, 12.0, 6.5}},
      {{"Headache", "HEADACHE", "Migraine"}, {5.1, 2.2, 2.4}},
      {{"Dyspnea", "SOB", "Shortness of breath"}, {0.2, 0.4, 0.8}},
      {{"Back pain", "LOWER BACK PAIN", "Back pain"}, {5.3, 2.5, 1.1}},
      {{"Cough", "COUGH", "Cough"}, {2.3, 1.9, 1.6}},
      {{"N/V", "Nausea", "Vomiting"}, {2.4, 2.4, 1.8}},
      {{"Fever", "FEVER", "Chills"}, {2.0, 5.1, 5.5}},
      {{"Syncope", "SYNCOPE", "Syncope"}, {1.9, 1.8, 1.4}},
      {{"Dizziness", "Dizzy", "Lightheaded"}, {2.7, 2.2, 1.4}},
  };
  return list;
}

const char* const kOtherComplaints[] = {
    "Fall",        "Laceration",   "Abnormal labs", "Wound eval",   "Alcohol intoxication",
    "Psych eval",  "Rash",         "Leg swelling",  "Weakness",     "Transfer",
    "Hand injury", "Hypertension", "Altered mental status", "Hyperglycemia", "Eye pain"};

const char* const kMedications[] = {
    "Acetaminophen", "Ondansetron",  "Morphine",   "Ketorolac",  "Aspirin",     "Lorazepam",
    "Metoprolol",    "Atorvastatin", "Lisinopril", "Omeprazole", "Insulin",     "Heparin",
    "Furosemide",    "Sodium Chloride 0.9%", "Ibuprofen", "Prednisone", "Albuterol", "Gabapentin"};

// Fractions of visits, scaled by the group's comorbidity burden.
constexpr std::array<double, 3> kCodesPerAdmission = {2.0, 4.0, 5.0};
constexpr std::array<double, 3> kBackgroundAdmissions = {0.3, 1.0, 1.5};
constexpr std::array<double, 3> kMedrecon = {4.4, 8.0, 7.8};
constexpr std::array<double, 3> kPyxis = {1.8, 4.2, 5.3};
constexpr std::array<double, 3> kAgeMean = {46.3, 60.0, 65.4};
constexpr std::array<double, 3> kFemale = {0.576, 0.507, 0.465};

void require_probability(double p, const char* name) {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorCode::BadConfig, std::string(name) + " must lie in (0, 1)");
  }
}

void require_rate(double p, const char* name) {
  if (!(p >= 0.0 && p < 1.0)) throw Error(ErrorCode::BadConfig, std::string(name) + " must lie in [0, 1)");
}

Timestamp plus_hours(Timestamp t, double hours) { return hours_after(t, hours); }

std::size_t rounded(double p, std::size_t n) {
  return static_cast<std::size_t>(std::llround(p * static_cast<double>(n)));
}

class Generator {
 public:
  Generator(const SynthConfig& config)
      : cfg_(config), rng_(config.seed), mapping_(comorbidity::MappingTable::shipped()) {}

  SynthCohort run() {
    layout_visits();
    assign_outcomes();
    make_patients();
    for (std::size_t p = 0; p < patient_visits_.size(); ++p) make_timeline(p);
    for (std::size_t p = 0; p < patient_visits_.size(); ++p) make_hospital_records(p);
    for (auto& v : visits_) make_ed_records(v);
    for (const auto& v : visits_) {
      out_.truth.push_back({subject_id(v.patient), v.stay_id, v.hospitalized, v.mortality, v.icu,
                            v.icu || v.mortality, v.revisit});
    }
    return std::move(out_);
  }

 private:
  std::int64_t subject_id(std::size_t p) const { return 10000000 + static_cast<std::int64_t>(p); }

  std::size_t visit_count() {
    const double keep = 1.0 - 1.0 / std::max(1.0, cfg_.mean_visits_per_patient);
    std::size_t k = 1;
    while (k < 60 && rng_.bernoulli(keep)) ++k;
    return k;
  }

  void layout_visits() {
    std::size_t total = 0;
    auto add_patient = [&](std::size_t k) {
      std::vector<std::size_t> idx;
      for (std::size_t i = 0; i < k; ++i) {
        Visit v;
        v.patient = patient_visits_.size();
        v.final = i + 1 == k;
        idx.push_back(visits_.size());
        visits_.push_back(v);
      }
      patient_visits_.push_back(std::move(idx));
      total += k;
    };
    if (cfg_.target_visits) {
      while (total < *cfg_.target_visits) add_patient(std::min(visit_count(), *cfg_.target_visits - total));
    } else {
      for (std::size_t p = 0; p < cfg_.n_patients; ++p) add_patient(visit_count());
    }
    // Stay ids follow patient order, then time order within a patient.
    for (std::size_t i = 0; i < visits_.size(); ++i) visits_[i].stay_id = 30000000 + static_cast<std::int64_t>(i);
  }

  std::vector<std::size_t> shuffled(std::vector<std::size_t> items) {
    rng_.shuffle(items);
    return items;
  }

  // Exact counts, so realized prevalence is the rounded target.
  void assign_outcomes() {
    const std::size_t n = visits_.size();
    const std::size_t n_hosp = rounded(cfg_.p_hospitalization, n);
    const std::size_t n_crit = std::min(rounded(cfg_.p_critical, n), n_hosp);
    const std::size_t n_icu = rounded(cfg_.p_icu_given_critical, n_crit);
    const std::size_t n_mort = std::max(rounded(cfg_.p_mortality_given_critical, n_crit), n_crit - n_icu);
    const std::size_t n_both = n_icu + n_mort - n_crit;

    std::vector<std::size_t> finals;
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) {
      all[i] = i;
      if (visits_[i].final) finals.push_back(i);
    }
    if (finals.size() < n_mort) throw Error(ErrorCode::BadConfig, "too few patients for the mortality target");
    finals = shuffled(finals);
    for (std::size_t k = 0; k < n_mort; ++k) {
      auto& v = visits_[finals[k]];
      v.mortality = true;
      v.hospitalized = true;
      v.icu = k < n_both;
    }
    std::size_t icu_left = n_icu - n_both;
    std::size_t hosp_left = n_hosp - n_mort;
    for (auto i : shuffled(all)) {
      auto& v = visits_[i];
      if (v.mortality) continue;
      if (icu_left > 0) {
        v.icu = v.hospitalized = true;
        --icu_left;
        --hosp_left;
      } else if (hosp_left > 0) {
        v.hospitalized = true;
        --hosp_left;
      } else {
        break;
      }
    }

    // Revisit pairs never touch an ICU visit, so an ICU stay can only fall in
    // its own visit's 12 h window.
    const std::size_t n_revisit = rounded(cfg_.p_reattendance, n);
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (!visits_[i].final && !visits_[i].icu && !visits_[i + 1].icu) candidates.push_back(i);
    }
    if (candidates.size() < n_revisit) {
      throw Error(ErrorCode::BadConfig, "too few repeat visits for the reattendance target; raise "
                                        "mean_visits_per_patient");
    }
    candidates = shuffled(candidates);
    for (std::size_t k = 0; k < n_revisit; ++k) visits_[candidates[k]].revisit = true;
  }

  void make_patients() {
    for (std::size_t p = 0; p < patient_visits_.size(); ++p) {
      int severity = kDischarged;
      for (auto i : patient_visits_[p]) severity = std::max(severity, static_cast<int>(visits_[i].group()));
      ingest::PatientRecord pat;
      pat.subject_id = subject_id(p);
      pat.gender = rng_.bernoulli(kFemale[severity]) ? ingest::Gender::Female : ingest::Gender::Male;
      if (rng_.bernoulli(cfg_.p_minor)) {
        pat.anchor_age = 2 + static_cast<int>(rng_.index(14));
      } else {
        pat.anchor_age = static_cast<int>(std::clamp(std::lround(rng_.normal(kAgeMean[severity], 19.0)), 18L, 91L));
      }
      pat.anchor_year = 2110 + static_cast<int>(rng_.index(70));
      severity_.push_back(severity);
      out_.tables.patients.push_back(pat);
    }
  }

  void make_timeline(std::size_t p) {
    const auto& pat = out_.tables.patients[p];
    Timestamp t = plus_hours(make_timestamp(pat.anchor_year, 1, 1), rng_.uniform(0.0, 365.0 * kDay));
    for (auto i : patient_visits_[p]) {
      auto& v = visits_[i];
      v.in = t;
      const double los = v.hospitalized ? 1.0 + rng_.exponential(8.0) : 0.5 + rng_.exponential(3.5);
      v.out = plus_hours(v.in, std::min(los, 48.0));
      // Reattendance gaps are (1.5 h, 71 h]; all others exceed 73 h.
      const double gap = v.revisit ? 71.0 - rng_.uniform() * 69.5 : 73.0 + rng_.exponential(90.0 * kDay);
      t = plus_hours(v.out, gap);
    }
  }

  void add_diagnoses(std::int64_t hadm, std::int64_t subject, int severity) {
    const int version = rng_.bernoulli(0.5) ? 9 : 10;
    const int n = 1 + rng_.poisson(kCodesPerAdmission[severity]);
    const auto& cats = mapping_.categories();
    for (int k = 0; k < n; ++k) {
      std::string code;
      if (rng_.bernoulli(0.6)) {
        const auto& cat = cats[rng_.index(cats.size())];
        const auto& prefixes = version == 9 ? cat.icd9 : cat.icd10;
        if (prefixes.empty()) continue;
        code = prefixes[rng_.index(prefixes.size())];
        if (code.size() < 5 && rng_.bernoulli(0.5)) code += static_cast<char>('0' + rng_.index(10));
      } else {
        code = noise_code(version);
        if (code.empty()) continue;
      }
      out_.tables.diagnoses.push_back({subject, hadm, k + 1, code, version});
    }
  }

  // A code that no mapping prefix matches.
  std::string noise_code(int version) {
    for (int attempt = 0; attempt < 50; ++attempt) {
      std::string code;
      if (version == 10) {
        code += "LRSTWXY"[rng_.index(7)];
        for (int d = 0; d < 3; ++d) code += static_cast<char>('0' + rng_.index(10));
      } else {
        code += rng_.bernoulli(0.5) ? 'V' : '7';
        for (int d = 0; d < 3; ++d) code += static_cast<char>('0' + rng_.index(10));
      }
      if (mapping_.match(code, version).empty()) return code;
    }
    return {};
  }

  void make_hospital_records(std::size_t p) {
    auto& tables = out_.tables;
    const auto subject = subject_id(p);
    const int severity = severity_[p];
    const auto& idx = patient_visits_[p];
    const Timestamp first_in = visits_[idx.front()].in;

    // Admissions not reached through the ED, before the first ED visit.
    const int n_background = rng_.poisson(kBackgroundAdmissions[severity]);
    for (int k = 0; k < n_background; ++k) {
      ingest::AdmissionRecord a;
      a.subject_id = subject;
      a.hadm_id = next_hadm_++;
      const Timestamp admit = plus_hours(first_in, -rng_.uniform(2.0 * kDay, 4.0 * 365.0 * kDay));
      a.admittime = admit;
      a.dischtime = std::min(plus_hours(admit, rng_.uniform(1.0, 7.0) * kDay), plus_hours(first_in, -kDay));
      tables.admissions.push_back(a);
      add_diagnoses(a.hadm_id, subject, severity);
    }

    Timestamp last_event = visits_[idx.back()].out;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      auto& v = visits_[idx[k]];
      if (!v.hospitalized) continue;
      ingest::AdmissionRecord a;
      a.subject_id = subject;
      a.hadm_id = next_hadm_++;
      v.hadm_id = a.hadm_id;
      const Timestamp admit = std::max(v.in, plus_hours(v.out, -rng_.uniform()));
      a.admittime = admit;
      double stay_days = v.mortality || v.icu ? 2.0 + rng_.exponential(6.0) : 0.5 + rng_.exponential(3.0);
      Timestamp disch = plus_hours(admit, stay_days * kDay);
      std::optional<Timestamp> icu_in;
      Timestamp icu_out{};
      if (v.icu) {
        icu_in = plus_hours(v.out, rng_.uniform(0.5, 11.5));
        icu_out = plus_hours(*icu_in, rng_.uniform(12.0, 96.0));
        disch = std::max(disch, plus_hours(icu_out, 6.0));
      }
      // Discharged before the next ED visit, so no admission spans two visits.
      if (k + 1 < idx.size()) disch = std::min(disch, plus_hours(visits_[idx[k + 1]].in, -0.5 * kHour));
      a.dischtime = disch;
      if (v.mortality) {
        // Death admissions last at least two days, so the date of death falls
        // after every earlier discharge date.
        a.deathtime = disch;
        tables.patients[p].dod = start_of_day(disch);
      }
      tables.admissions.push_back(a);
      add_diagnoses(a.hadm_id, subject, severity);
      if (icu_in) {
        ingest::IcuStayRecord icu;
        icu.subject_id = subject;
        icu.hadm_id = a.hadm_id;
        icu.icu_stay_id = next_icu_++;
        icu.intime = icu_in;
        icu.outtime = std::min(icu_out, disch);
        tables.icustays.push_back(icu);
      }
      last_event = std::max(last_event, disch);
    }
    // A few survivors die long after their last contact.
    if (!tables.patients[p].dod && rng_.bernoulli(0.03)) {
      tables.patients[p].dod = start_of_day(plus_hours(last_event, (30.0 + rng_.uniform(0.0, 365.0)) * kDay));
    }
  }

  std::optional<double> vital(const VitalMoments& m, double lo, double hi, double outlier_lo, double outlier_hi,
                              double step) {
    if (rng_.bernoulli(cfg_.missing_rate)) return std::nullopt;
    if (rng_.bernoulli(cfg_.outlier_rate)) return std::round(rng_.uniform(outlier_lo, outlier_hi));
    const double x = std::clamp(rng_.normal(m.mean, m.sd), lo, hi);
    return std::round(x / step) * step;
  }

  VitalSigns draw_vitals(const GroupVitals& g) {
    VitalSigns s;
    // Temperature is charted in whole tenths of a degree Fahrenheit.
    if (auto f = vital({g.temperature.mean * 1.8 + 32.0, g.temperature.sd * 1.8}, 93.0, 106.0, 114.0, 130.0, 0.1)) {
      s.temperature = ingest::convert_temperature(*f, ingest::TemperatureUnit::Fahrenheit);
    }
    s.heartrate = vital(g.heartrate, 30.0, 200.0, 300.0, 999.0, 1.0);
    s.resprate = vital(g.resprate, 6.0, 50.0, 301.0, 999.0, 1.0);
    s.o2sat = vital(g.o2sat, 60.0, 100.0, 101.0, 999.0, 1.0);
    s.sbp = vital(g.sbp, 60.0, 240.0, 400.0, 999.0, 1.0);
    s.dbp = vital(g.dbp, 30.0, 160.0, 400.0, 999.0, 1.0);
    return s;
  }

  std::string complaint(Group g) {
    const auto& list = complaints();
    std::vector<double> weights;
    double used = 0.0;
    for (const auto& c : list) {
      weights.push_back(c.weight[g]);
      used += c.weight[g];
    }
    weights.push_back(100.0 - used);
    const auto pick = rng_.categorical(weights);
    std::string text = pick < list.size() ? list[pick].forms[rng_.index(3)]
                                          : kOtherComplaints[rng_.index(std::size(kOtherComplaints))];
    if (rng_.bernoulli(0.1)) text += std::string(", ") + kOtherComplaints[rng_.index(std::size(kOtherComplaints))];
    return text;
  }

  void make_ed_records(const Visit& v) {
    auto& tables = out_.tables;
    const auto subject = subject_id(v.patient);
    const Group g = v.group();

    ingest::EdStayRecord stay;
    stay.subject_id = subject;
    stay.stay_id = v.stay_id;
    stay.hadm_id = v.hadm_id;
    stay.intime = v.in;
    stay.outtime = v.out;
    stay.disposition = v.hospitalized ? "ADMITTED" : (rng_.bernoulli(0.9) ? "HOME" : "LEFT WITHOUT BEING SEEN");
    tables.edstays.push_back(stay);

    const GroupVitals& tv = g == kCritical ? cfg_.critical : g == kHospitalized ? cfg_.hospitalized : cfg_.discharged;
    ingest::TriageRecord tri;
    tri.subject_id = subject;
    tri.stay_id = v.stay_id;
    tri.vitals = draw_vitals(tv);
    if (!rng_.bernoulli(cfg_.missing_rate)) {
      tri.pain = std::clamp(std::round(rng_.normal(tv.pain.mean, tv.pain.sd)), 0.0, 10.0);
    }
    if (!rng_.bernoulli(cfg_.p_missing_acuity)) tri.acuity = 1 + static_cast<int>(rng_.categorical(kAcuity[g]));
    tri.chiefcomplaint = complaint(g);
    tables.triage.push_back(tri);

    const GroupVitals& ev =
        g == kCritical ? cfg_.ed_critical : g == kHospitalized ? cfg_.ed_hospitalized : cfg_.ed_discharged;
    const double span = hours_between(v.in, v.out);
    const int n_vitals = 1 + std::min(rng_.poisson(1.5), 5);
    std::vector<double> offsets;
    for (int k = 0; k < n_vitals; ++k) offsets.push_back(rng_.uniform(0.0, span));
    std::sort(offsets.begin(), offsets.end());
    for (double off : offsets) {
      ingest::VitalSignRecord r;
      r.subject_id = subject;
      r.stay_id = v.stay_id;
      r.charttime = plus_hours(v.in, off);
      r.vitals = draw_vitals(ev);
      tables.vitalsign.push_back(r);
    }

    const int n_recon = rng_.poisson(kMedrecon[g]);
    for (int k = 0; k < n_recon; ++k) {
      tables.medrecon.push_back({subject, v.stay_id, plus_hours(v.in, rng_.uniform(0.0, span)),
                                 kMedications[rng_.index(std::size(kMedications))]});
    }
    const int n_pyxis = rng_.poisson(kPyxis[g]);
    for (int k = 0; k < n_pyxis; ++k) {
      tables.pyxis.push_back({subject, v.stay_id, plus_hours(v.in, rng_.uniform(0.0, span)),
                              kMedications[rng_.index(std::size(kMedications))]});
    }
  }

  const SynthConfig& cfg_;
  Rng rng_;
  const comorbidity::MappingTable& mapping_;
  std::vector<Visit> visits_;
  std::vector<std::vector<std::size_t>> patient_visits_;
  std::vector<int> severity_;
  std::int64_t next_hadm_ = 20000000;
  std::int64_t next_icu_ = 40000000;
  SynthCohort out_;
};

}  // namespace

void validate(const SynthConfig& c) {
  if (!c.target_visits && c.n_patients < 1) throw Error(ErrorCode::BadConfig, "n_patients must be at least 1");
  if (c.target_visits && *c.target_visits < 1) throw Error(ErrorCode::BadConfig, "target_visits must be at least 1");
  if (!(c.mean_visits_per_patient >= 1.0)) {
    throw Error(ErrorCode::BadConfig, "mean_visits_per_patient must be at least 1");
  }
  require_probability(c.p_hospitalization, "p_hospitalization");
  require_probability(c.p_critical, "p_critical");
  require_probability(c.p_reattendance, "p_reattendance");
  require_probability(c.p_icu_given_critical, "p_icu_given_critical");
  require_probability(c.p_mortality_given_critical, "p_mortality_given_critical");
  if (c.p_critical > c.p_hospitalization) {
    throw Error(ErrorCode::BadConfig, "p_critical cannot exceed p_hospitalization");
  }
  require_rate(c.p_minor, "p_minor");
  require_rate(c.p_missing_acuity, "p_missing_acuity");
  require_rate(c.missing_rate, "missing_rate");
  require_rate(c.outlier_rate, "outlier_rate");
}

SynthCohort generate_cohort(const SynthConfig& config) {
  validate(config);
  return Generator(config).run();
}

std::string ground_truth_csv(const std::vector<GroundTruth>& truth) {
  csv::Writer w({"subject_id", "stay_id", "outcome_hospitalization", "outcome_inhospital_mortality",
                 "outcome_icu_transfer_12h", "outcome_critical", "outcome_ed_revisit_3d"});
  for (const auto& t : truth) {
    w.add_row({std::to_string(t.subject_id), std::to_string(t.stay_id), t.hospitalization ? "1" : "0",
               t.inhospital_mortality ? "1" : "0", t.icu_transfer_12h ? "1" : "0", t.critical ? "1" : "0",
               t.ed_revisit_3d ? "1" : "0"});
  }
  return w.str();
}

std::vector<GroundTruth> read_ground_truth(const std::filesystem::path& path) {
  const auto doc = csv::read_file(path);
  auto col = [&](const char* name) {
    auto c = doc.column(name);
    if (!c) throw Error(ErrorCode::MissingColumn, path.string() + ": no column " + name);
    return *c;
  };
  const auto subject = col("subject_id");
  const auto stay = col("stay_id");
  const std::array<std::size_t, 5> flags = {col("outcome_hospitalization"), col("outcome_inhospital_mortality"),
                                            col("outcome_icu_transfer_12h"), col("outcome_critical"),
                                            col("outcome_ed_revisit_3d")};
  std::vector<GroundTruth> out;
  for (std::size_t r = 0; r < doc.rows.size(); ++r) {
    const auto& row = doc.rows[r];
    auto integer = [&](std::size_t c) {
      auto v = csv::parse_integer(row[c]);
      if (!v) {
        throw Error(ErrorCode::MalformedRow,
                    path.string() + ":" + std::to_string(doc.line_numbers[r]) + ": bad integer '" + row[c] + "'");
      }
      return *v;
    };
    GroundTruth t;
    t.subject_id = integer(subject);
    t.stay_id = integer(stay);
    t.hospitalization = integer(flags[0]) != 0;
    t.inhospital_mortality = integer(flags[1]) != 0;
    t.icu_transfer_12h = integer(flags[2]) != 0;
    t.critical = integer(flags[3]) != 0;
    t.ed_revisit_3d = integer(flags[4]) != 0;
    out.push_back(t);
  }
  return out;
}

void write_cohort(const std::filesystem::path& dir, const SynthCohort& cohort) {
  std::filesystem::create_directories(dir);
  ingest::write_raw_tables(dir, cohort.tables, ingest::ParseOptions{});
  csv::write_text_file(dir / "ground_truth.csv", ground_truth_csv(cohort.truth));
}

SynthConfig parse_config(std::string_view json_text, SynthConfig c) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadConfig, std::string("synth config: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::BadConfig, "synth config must be a JSON object");
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "n_patients") c.n_patients = value.get<std::size_t>();
      else if (key == "target_visits") c.target_visits = value.is_null() ? std::nullopt : std::optional(value.get<std::size_t>());
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "mean_visits_per_patient") c.mean_visits_per_patient = value.get<double>();
      else if (key == "p_hospitalization") c.p_hospitalization = value.get<double>();
      else if (key == "p_critical") c.p_critical = value.get<double>();
      else if (key == "p_reattendance") c.p_reattendance = value.get<double>();
      else if (key == "p_icu_given_critical") c.p_icu_given_critical = value.get<double>();
      else if (key == "p_mortality_given_critical") c.p_mortality_given_critical = value.get<double>();
      else if (key == "p_minor") c.p_minor = value.get<double>();
      else if (key == "p_missing_acuity") c.p_missing_acuity = value.get<double>();
      else if (key == "missing_rate") c.missing_rate = value.get<double>();
      else if (key == "outlier_rate") c.outlier_rate = value.get<double>();
      else throw Error(ErrorCode::BadConfig, "unknown synth setting '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadConfig, std::string("synth config: ") + e.what());
  }
  validate(c);
  return c;
}

}  // namespace edbench::synthdata
