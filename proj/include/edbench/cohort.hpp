#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "edbench/common/log.hpp"
#include "edbench/common/table.hpp"
#include "edbench/comorbidity.hpp"
#include "edbench/ingest.hpp"

namespace edbench::cohort {

inline constexpr std::array<int, 3> kHistoryWindowsDays = {30, 90, 365};

/// anchor_age shifted by the calendar years between anchor_year and the
/// visit, never below anchor_age (clock skew) and never negative.
int compute_age(const ingest::PatientRecord& patient, Timestamp ed_intime);

/// Events in [t - window_days, t). `event_times` must be sorted ascending.
std::size_t count_prior_events(const std::vector<Timestamp>& event_times, Timestamp t,
                               int window_days);

/// Per field, the value at the latest charttime where that field is present.
/// Rows without a charttime are ignored.
ingest::VitalSigns extract_ed_vitals(const std::vector<ingest::VitalSignRecord>& vitals);

/// Lower case, every non-alphanumeric run becomes one space, padded with a
/// space at both ends so aliases can be matched as whole words.
std::string normalize_complaint(std::string_view text);

/// Keyword table for chief-complaint categories.
///
/// File format: one category per line, `name: alias | alias | ...`. Aliases
/// are normalized like the complaint text and must occur as whole words.
class ComplaintMatcher {
 public:
  static ComplaintMatcher parse(std::string_view text);
  static ComplaintMatcher load(const std::filesystem::path& path);
  static const ComplaintMatcher& shipped();
  static std::filesystem::path default_path();

  const std::vector<std::string>& categories() const { return names_; }
  std::vector<bool> match(std::string_view text) const;

 private:
  std::vector<std::string> names_;
  std::vector<std::vector<std::string>> aliases_;  // normalized, space padded
};

/// True iff the stay carries a hadm_id that resolves among `subject`'s
/// admissions. A dangling hadm_id is logged when `log` is given.
bool label_hospitalization(const ingest::EdStayRecord& stay, const ingest::SubjectData& subject,
                           IssueLog* log = nullptr);

/// Death during the linked admission: deathtime <= dischtime, or, at date
/// precision, dod <= discharge date.
bool label_inpatient_mortality(const ingest::AdmissionRecord* admission,
                               const ingest::PatientRecord& patient);

/// Some ICU intime in [ED intime, ED outtime + 12h].
bool label_icu_transfer_12h(const ingest::EdStayRecord& stay,
                            const std::vector<ingest::IcuStayRecord>& icu_stays);

inline bool label_critical(bool mortality, bool icu_12h) { return mortality || icu_12h; }

/// The subject's next ED stay (by intime, then stay_id) starts within
/// (0, 72h] of this stay's outtime. `subject_stays` sorted by intime.
bool label_ed_reattendance_72h(const ingest::EdStayRecord& stay,
                               const std::vector<const ingest::EdStayRecord*>& subject_stays);

struct MasterRecord {
  std::int64_t subject_id = 0;
  std::int64_t stay_id = 0;
  std::optional<std::int64_t> hadm_id;
  int age = 0;
  ingest::Gender gender = ingest::Gender::Unknown;

  std::array<int, 3> n_ed{};    // 30d, 90d, 365d
  std::array<int, 3> n_hosp{};
  std::array<int, 3> n_icu{};

  std::vector<int> cci;  // table order of the mapping file
  std::vector<int> eci;

  std::optional<int> triage_acuity;
  ingest::VitalSigns triage;
  std::optional<double> triage_pain;
  std::vector<bool> chiefcom;

  ingest::VitalSigns ed;
  double ed_los = 0.0;  // hours
  int n_med = 0;
  int n_medrecon = 0;

  bool outcome_hospitalization = false;
  bool outcome_inhospital_mortality = false;
  bool outcome_icu_transfer_12h = false;
  bool outcome_critical = false;
  bool outcome_ed_revisit_3d = false;

  friend bool operator==(const MasterRecord&, const MasterRecord&) = default;
};

struct MasterOptions {
  comorbidity::LookbackOptions lookback;
  unsigned threads = 1;
};

struct MasterStats {
  std::size_t records = 0;
  std::size_t subjects = 0;
  comorbidity::LookbackStats lookback;
};

/// One record per root stay, ascending stay_id.
std::vector<MasterRecord> build_master(const ingest::LinkedCohort& cohort,
                                       const comorbidity::MappingTable& mapping,
                                       const ComplaintMatcher& complaints,
                                       const MasterOptions& options, IssueLog& log,
                                       MasterStats* stats = nullptr);

/// Column order of master_dataset.csv: identifiers, demographics, history,
/// comorbidity, triage, ED, outcomes. Gender is 1 for F, 0 for M.
std::vector<std::string> master_columns(const comorbidity::MappingTable& mapping,
                                        const ComplaintMatcher& complaints);

NumericTable to_table(const std::vector<MasterRecord>& records,
                      const comorbidity::MappingTable& mapping,
                      const ComplaintMatcher& complaints);

inline constexpr std::string_view kOutcomeColumns[] = {
    "outcome_hospitalization", "outcome_inhospital_mortality", "outcome_icu_transfer_12h",
    "outcome_critical", "outcome_ed_revisit_3d"};

}  // namespace edbench::cohort
