#include <gtest/gtest.h>

#include <algorithm>

#include "edbench/cohort.hpp"
#include "edbench/common/random.hpp"
#include "support/fixtures.hpp"

using namespace edbench;
using namespace edbench::cohort;
using ingest::EdStayRecord;
namespace t = edbench::testing;

namespace {

std::vector<MasterRecord> master_of(const ingest::RawTables& raw, IssueLog& log, int years = 5) {
  MasterOptions o;
  o.lookback.years = years;
  return build_master(ingest::link_tables(raw, log), comorbidity::MappingTable::shipped(), ComplaintMatcher::shipped(),
                      o, log);
}

std::size_t category(const std::string& name) {
  const auto& cats = ComplaintMatcher::shipped().categories();
  return static_cast<std::size_t>(std::find(cats.begin(), cats.end(), name) - cats.begin());
}

}  // namespace

TEST(ComputeAge, Examples) {
  const auto p = t::patient(1, 50, 2150);
  EXPECT_EQ(compute_age(p, t::ts(2153, 6, 1)), 53);
  EXPECT_EQ(compute_age(p, t::ts(2150, 12, 31)), 50);
  EXPECT_EQ(compute_age(p, t::ts(2149, 12, 31)), 50);
  EXPECT_EQ(compute_age(t::patient(2, 0, 2150), t::ts(2140, 1, 1)), 0);
}

TEST(CountPriorEvents, Examples) {
  const auto now = t::ts(2150, 6, 1, 12);
  const std::vector<Timestamp> events = {now - 400 * kSecondsPerDay, now - 45 * kSecondsPerDay,
                                         now - 10 * kSecondsPerDay};
  EXPECT_EQ(count_prior_events(events, now, 30), 1u);
  EXPECT_EQ(count_prior_events(events, now, 90), 2u);
  EXPECT_EQ(count_prior_events(events, now, 365), 2u);
  for (int w : kHistoryWindowsDays) EXPECT_EQ(count_prior_events({now}, now, w), 0u);
  // Lower edge is inclusive.
  EXPECT_EQ(count_prior_events({now - 30 * kSecondsPerDay}, now, 30), 1u);
}

TEST(ExtractEdVitals, LatestPerField) {
  const auto base = t::ts(2150, 1, 1, 10);
  ingest::VitalSignRecord a, b;
  a.charttime = base;
  a.vitals.heartrate = 80;
  b.charttime = base + 2 * kSecondsPerHour;
  b.vitals.heartrate = 90;
  EXPECT_EQ(extract_ed_vitals({b, a}).heartrate, 90.0);

  ingest::VitalSignRecord hr_only, sbp_only;
  hr_only.charttime = base;
  hr_only.vitals.heartrate = 77;
  sbp_only.charttime = base + 2 * kSecondsPerHour;
  sbp_only.vitals.sbp = 131;
  const auto v = extract_ed_vitals({hr_only, sbp_only});
  EXPECT_EQ(v.heartrate, 77.0);
  EXPECT_EQ(v.sbp, 131.0);
  EXPECT_FALSE(v.dbp);

  EXPECT_EQ(extract_ed_vitals({}), ingest::VitalSigns{});
}

TEST(ChiefComplaints, Examples) {
  const auto& m = ComplaintMatcher::shipped();
  ASSERT_EQ(m.categories().size(), 10u);
  const auto hits = m.match("CHEST PAIN, SOB");
  for (std::size_t c = 0; c < hits.size(); ++c) {
    const bool expected = c == category("chest_pain") || c == category("shortness_of_breath");
    EXPECT_EQ(hits[c], expected) << m.categories()[c];
  }
  EXPECT_EQ(m.match(""), std::vector<bool>(10, false));
  const auto nv = m.match("n/v");
  EXPECT_TRUE(nv[category("nausea_vomiting")]);
  EXPECT_EQ(std::count(nv.begin(), nv.end(), true), 1);
  // Whole words only: "sob" inside another word does not fire.
  EXPECT_FALSE(m.match("sobbing")[category("shortness_of_breath")]);
}

TEST(ChiefComplaints, CustomTable) {
  const auto m = ComplaintMatcher::parse("# comment\nfall: fall | s/p fall\nrash: rash\n");
  EXPECT_EQ(m.categories(), (std::vector<std::string>{"fall", "rash"}));
  EXPECT_EQ(m.match("S/P FALL"), (std::vector<bool>{true, false}));
}

TEST(LabelHospitalization, Rules) {
  ingest::SubjectData subject;
  subject.admissions = {t::admission(1, 101, t::ts(2150, 1, 1, 14), 2)};
  EXPECT_TRUE(label_hospitalization(t::stay(1, 11, t::ts(2150, 1, 1, 10), 4, 101), subject));
  EXPECT_FALSE(label_hospitalization(t::stay(1, 11, t::ts(2150, 1, 1, 10), 4), subject));
  IssueLog log;
  EXPECT_FALSE(label_hospitalization(t::stay(1, 11, t::ts(2150, 1, 1, 10), 4, 555), subject, &log));
  EXPECT_EQ(log.issues().size(), 1u);
}

TEST(LabelMortality, Rules) {
  const auto p = t::patient(1);
  EXPECT_FALSE(label_inpatient_mortality(nullptr, p));
  auto a = t::admission(1, 101, t::ts(2150, 1, 1, 14), 5);
  EXPECT_FALSE(label_inpatient_mortality(&a, p));
  a.deathtime = *a.dischtime - kSecondsPerHour;
  EXPECT_TRUE(label_inpatient_mortality(&a, p));

  auto b = t::admission(1, 102, t::ts(2150, 1, 1, 14), 5);
  auto late = p;
  late.dod = start_of_day(*b.dischtime) + 3 * kSecondsPerDay;
  EXPECT_FALSE(label_inpatient_mortality(&b, late));
  // dod is a date: the discharge day itself counts even though midnight is
  // earlier than the discharge time.
  auto same_day = p;
  same_day.dod = start_of_day(*b.dischtime);
  EXPECT_TRUE(label_inpatient_mortality(&b, same_day));
}

TEST(LabelIcuTransfer, Window) {
  const auto s = t::stay(1, 11, t::ts(2150, 1, 1, 6), 4);  // out 10:00
  auto icu_at = [](Timestamp in) {
    ingest::IcuStayRecord r;
    r.intime = in;
    r.outtime = in + kSecondsPerDay;
    return std::vector<ingest::IcuStayRecord>{r};
  };
  EXPECT_TRUE(label_icu_transfer_12h(s, icu_at(t::ts(2150, 1, 1, 18))));
  EXPECT_FALSE(label_icu_transfer_12h(s, icu_at(t::ts(2150, 1, 2, 23))));
  EXPECT_TRUE(label_icu_transfer_12h(s, icu_at(t::ts(2150, 1, 1, 9, 30))));
  EXPECT_TRUE(label_icu_transfer_12h(s, icu_at(t::ts(2150, 1, 1, 22))));   // exactly +12h
  EXPECT_FALSE(label_icu_transfer_12h(s, icu_at(t::ts(2150, 1, 1, 5))));   // before ED arrival
  EXPECT_FALSE(label_icu_transfer_12h(s, {}));
}

TEST(LabelCritical, TruthTable) {
  EXPECT_TRUE(label_critical(true, false));
  EXPECT_TRUE(label_critical(false, true));
  EXPECT_TRUE(label_critical(true, true));
  EXPECT_FALSE(label_critical(false, false));
}

TEST(LabelReattendance, Examples) {
  const auto first = t::stay(1, 11, t::ts(2150, 1, 1, 6), 4);
  const auto at48 = t::stay(1, 12, hours_after(*first.outtime, 48), 2);
  const auto at80 = t::stay(1, 13, hours_after(*first.outtime, 80), 2);
  EXPECT_TRUE(label_ed_reattendance_72h(first, {&first, &at48}));
  EXPECT_FALSE(label_ed_reattendance_72h(first, {&first, &at80}));
  EXPECT_FALSE(label_ed_reattendance_72h(first, {&first}));
  const auto at72 = t::stay(1, 14, hours_after(*first.outtime, 72), 2);
  EXPECT_TRUE(label_ed_reattendance_72h(first, {&first, &at72}));
}

TEST(LabelReattendance, AntisymmetryProperty) {
  Rng rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    const int k = 2 + static_cast<int>(rng.index(6));
    const bool far_only = trial % 2 == 0;
    std::vector<EdStayRecord> stays;
    Timestamp clock = t::ts(2150, 1, 1);
    for (int i = 0; i < k; ++i) {
      stays.push_back(t::stay(1, 100 + i, clock, rng.uniform(0.5, 10.0)));
      const double gap = far_only || rng.bernoulli(0.5) ? rng.uniform(72.01, 500.0) : rng.uniform(0.1, 72.0);
      clock = hours_after(*stays.back().outtime, gap);
    }
    std::vector<const EdStayRecord*> ptrs;
    for (const auto& s : stays) ptrs.push_back(&s);
    for (int i = 0; i < k; ++i) {
      bool expected = false;
      if (i + 1 < k) {
        const double gap = hours_between(*stays[i].outtime, stays[i + 1].intime);
        expected = gap > 0 && gap <= 72.0;
      }
      ASSERT_EQ(label_ed_reattendance_72h(stays[i], ptrs), expected) << "trial " << trial << " visit " << i;
      if (far_only) ASSERT_FALSE(label_ed_reattendance_72h(stays[i], ptrs));
    }
  }
}

TEST(BuildMaster, CardinalityAndSingleVisitHistory) {
  ingest::RawTables raw;
  raw.patients = {t::patient(1), t::patient(2)};
  raw.edstays = {t::stay(1, 11, t::ts(2150, 1, 1), 3), t::stay(2, 21, t::ts(2150, 1, 1), 3),
                 t::stay(2, 22, t::ts(2150, 1, 20), 3)};
  IssueLog log;
  const auto m = master_of(raw, log);
  ASSERT_EQ(m.size(), 3u);
  const std::array<int, 3> zero{};
  EXPECT_EQ(m[0].n_ed, zero);
  EXPECT_EQ(m[0].n_hosp, zero);
  EXPECT_EQ(m[0].n_icu, zero);
  EXPECT_EQ(m[2].n_ed, (std::array<int, 3>{1, 1, 1}));
  EXPECT_FALSE(m[0].triage_acuity);
}

TEST(BuildMaster, CountsAndLos) {
  ingest::RawTables raw;
  raw.patients = {t::patient(1)};
  raw.edstays = {t::stay(1, 11, t::ts(2150, 1, 1, 8), 5.5)};
  raw.triage = {t::triage(1, 11, 2, "Headache, dizzy")};
  for (int i = 0; i < 3; ++i) raw.pyxis.push_back({1, 11, t::ts(2150, 1, 1, 9), "drug"});
  raw.medrecon.push_back({1, 11, t::ts(2150, 1, 1, 9), "home med"});
  IssueLog log;
  const auto m = master_of(raw, log);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_DOUBLE_EQ(m[0].ed_los, 5.5);
  EXPECT_EQ(m[0].n_med, 3);
  EXPECT_EQ(m[0].n_medrecon, 1);
  EXPECT_EQ(m[0].triage_acuity, 2);
  EXPECT_TRUE(m[0].chiefcom[category("headache")]);
  EXPECT_TRUE(m[0].chiefcom[category("dizziness")]);
}

TEST(BuildMaster, InvariantsOnSyntheticCohort) {
  const auto cohort = synthdata::generate_cohort(t::synth_config(3000, 4));
  IssueLog log;
  const auto m = master_of(cohort.tables, log);
  ASSERT_EQ(m.size(), 3000u);
  for (const auto& r : m) {
    for (const auto* triple : {&r.n_ed, &r.n_hosp, &r.n_icu}) {
      EXPECT_GE((*triple)[0], 0);
      EXPECT_LE((*triple)[0], (*triple)[1]);
      EXPECT_LE((*triple)[1], (*triple)[2]);
    }
    EXPECT_EQ(r.outcome_critical, r.outcome_inhospital_mortality || r.outcome_icu_transfer_12h);
    EXPECT_GE(r.ed_los, 0.0);
    EXPECT_GE(r.n_med, 0);
    EXPECT_GE(r.n_medrecon, 0);
  }
  EXPECT_TRUE(std::is_sorted(m.begin(), m.end(), [](const auto& a, const auto& b) { return a.stay_id < b.stay_id; }));
}

TEST(BuildMaster, RowOrderAndThreadInsensitive) {
  auto raw = synthdata::generate_cohort(t::synth_config(1500, 8)).tables;
  IssueLog log;
  const auto reference = master_of(raw, log);
  Rng rng(77);
  rng.shuffle(raw.edstays);
  rng.shuffle(raw.triage);
  rng.shuffle(raw.vitalsign);
  rng.shuffle(raw.patients);
  rng.shuffle(raw.admissions);
  rng.shuffle(raw.icustays);
  rng.shuffle(raw.diagnoses);
  rng.shuffle(raw.medrecon);
  rng.shuffle(raw.pyxis);
  EXPECT_EQ(master_of(raw, log), reference);

  MasterOptions threaded;
  threaded.threads = 4;
  EXPECT_EQ(build_master(ingest::link_tables(raw, log), comorbidity::MappingTable::shipped(),
                         ComplaintMatcher::shipped(), threaded, log),
            reference);
}

TEST(MasterTable, ColumnOrderAndEncoding) {
  const auto& mapping = comorbidity::MappingTable::shipped();
  const auto& complaints = ComplaintMatcher::shipped();
  const auto cols = master_columns(mapping, complaints);
  auto pos = [&](const std::string& name) {
    return static_cast<std::size_t>(std::find(cols.begin(), cols.end(), name) - cols.begin());
  };
  EXPECT_EQ(cols.front(), "subject_id");
  EXPECT_LT(pos("age"), pos("n_ed_30d"));
  EXPECT_LT(pos("n_icu_365d"), pos("cci_myocardial_infarction"));
  EXPECT_LT(pos("eci_depression"), pos("triage_acuity"));
  EXPECT_LT(pos("chiefcom_dizziness"), pos("ed_temperature"));
  EXPECT_LT(pos("n_medrecon"), pos("outcome_hospitalization"));
  EXPECT_EQ(cols.back(), "outcome_ed_revisit_3d");

  ingest::RawTables raw;
  raw.patients = {t::patient(1)};
  raw.patients[0].gender = ingest::Gender::Male;
  raw.edstays = {t::stay(1, 11, t::ts(2150, 1, 1), 3)};
  IssueLog log;
  const auto table = to_table(master_of(raw, log), mapping, complaints);
  EXPECT_EQ(table.column("gender")[0], 0.0);
  EXPECT_TRUE(is_missing(table.column("triage_acuity")[0]));
  EXPECT_TRUE(is_missing(table.column("hadm_id")[0]));
}
