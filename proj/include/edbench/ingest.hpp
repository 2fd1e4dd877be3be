#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "edbench/common/log.hpp"
#include "edbench/common/time.hpp"

namespace edbench::ingest {

enum class TemperatureUnit { Fahrenheit, Celsius };

TemperatureUnit parse_temperature_unit(std::string_view text);

/// Degrees in `unit` to degrees Celsius.
double convert_temperature(double value, TemperatureUnit unit);

struct VitalSigns {
  std::optional<double> temperature;  // Celsius
  std::optional<double> heartrate;
  std::optional<double> resprate;
  std::optional<double> o2sat;
  std::optional<double> sbp;
  std::optional<double> dbp;

  friend bool operator==(const VitalSigns&, const VitalSigns&) = default;
};

struct EdStayRecord {
  std::int64_t subject_id = 0;
  std::int64_t stay_id = 0;
  std::optional<std::int64_t> hadm_id;
  Timestamp intime;
  std::optional<Timestamp> outtime;
  std::string disposition;

  friend bool operator==(const EdStayRecord&, const EdStayRecord&) = default;
};

struct TriageRecord {
  std::int64_t subject_id = 0;
  std::int64_t stay_id = 0;
  VitalSigns vitals;
  std::optional<double> pain;
  std::optional<int> acuity;
  std::string chiefcomplaint;

  friend bool operator==(const TriageRecord&, const TriageRecord&) = default;
};

struct VitalSignRecord {
  std::int64_t subject_id = 0;
  std::int64_t stay_id = 0;
  std::optional<Timestamp> charttime;
  VitalSigns vitals;

  friend bool operator==(const VitalSignRecord&, const VitalSignRecord&) = default;
};

enum class Gender { Female, Male, Unknown };

std::string_view to_string(Gender gender);

struct PatientRecord {
  std::int64_t subject_id = 0;
  Gender gender = Gender::Unknown;
  int anchor_age = 0;
  int anchor_year = 0;
  std::optional<Timestamp> dod;

  friend bool operator==(const PatientRecord&, const PatientRecord&) = default;
};

struct AdmissionRecord {
  std::int64_t subject_id = 0;
  std::int64_t hadm_id = 0;
  std::optional<Timestamp> admittime;
  std::optional<Timestamp> dischtime;
  std::optional<Timestamp> deathtime;

  friend bool operator==(const AdmissionRecord&, const AdmissionRecord&) = default;
};

struct IcuStayRecord {
  std::int64_t subject_id = 0;
  std::optional<std::int64_t> hadm_id;
  std::int64_t icu_stay_id = 0;
  std::optional<Timestamp> intime;
  std::optional<Timestamp> outtime;

  friend bool operator==(const IcuStayRecord&, const IcuStayRecord&) = default;
};

struct DiagnosisRecord {
  std::int64_t subject_id = 0;
  std::int64_t hadm_id = 0;
  int seq_num = 0;
  std::string icd_code;
  int icd_version = 0;

  friend bool operator==(const DiagnosisRecord&, const DiagnosisRecord&) = default;
};

struct MedreconRecord {
  std::int64_t subject_id = 0;
  std::int64_t stay_id = 0;
  std::optional<Timestamp> charttime;
  std::string name;

  friend bool operator==(const MedreconRecord&, const MedreconRecord&) = default;
};

struct PyxisRecord {
  std::int64_t subject_id = 0;
  std::int64_t stay_id = 0;
  std::optional<Timestamp> charttime;
  std::string name;

  friend bool operator==(const PyxisRecord&, const PyxisRecord&) = default;
};

struct RawTables {
  std::vector<EdStayRecord> edstays;
  std::vector<TriageRecord> triage;
  std::vector<VitalSignRecord> vitalsign;
  std::vector<PatientRecord> patients;
  std::vector<AdmissionRecord> admissions;
  std::vector<IcuStayRecord> icustays;
  std::vector<DiagnosisRecord> diagnoses;
  std::vector<MedreconRecord> medrecon;
  std::vector<PyxisRecord> pyxis;

  friend bool operator==(const RawTables&, const RawTables&) = default;
};

enum class TableKind { EdStays, Triage, VitalSign, Patients, Admissions, IcuStays, Diagnoses, Medrecon, Pyxis };

inline constexpr TableKind kAllTables[] = {
    TableKind::EdStays,    TableKind::Triage,   TableKind::VitalSign,
    TableKind::Patients,   TableKind::Admissions, TableKind::IcuStays,
    TableKind::Diagnoses,  TableKind::Medrecon, TableKind::Pyxis};

std::string_view file_name(TableKind kind);
/// Header columns that must be present; extra columns are ignored.
const std::vector<std::string>& required_columns(TableKind kind);

struct ParseOptions {
  TemperatureUnit temperature_unit = TemperatureUnit::Fahrenheit;
};

template <class Record>
struct TableTraits;

template <> struct TableTraits<EdStayRecord> { static constexpr TableKind kind = TableKind::EdStays; };
template <> struct TableTraits<TriageRecord> { static constexpr TableKind kind = TableKind::Triage; };
template <> struct TableTraits<VitalSignRecord> { static constexpr TableKind kind = TableKind::VitalSign; };
template <> struct TableTraits<PatientRecord> { static constexpr TableKind kind = TableKind::Patients; };
template <> struct TableTraits<AdmissionRecord> { static constexpr TableKind kind = TableKind::Admissions; };
template <> struct TableTraits<IcuStayRecord> { static constexpr TableKind kind = TableKind::IcuStays; };
template <> struct TableTraits<DiagnosisRecord> { static constexpr TableKind kind = TableKind::Diagnoses; };
template <> struct TableTraits<MedreconRecord> { static constexpr TableKind kind = TableKind::Medrecon; };
template <> struct TableTraits<PyxisRecord> { static constexpr TableKind kind = TableKind::Pyxis; };

/// Parses CSV text of one source table. `source` names the file in log lines.
///
/// Errors: MissingColumn when a required header is absent, MalformedRow when
/// a row's field count differs from the header, BadTimestamp for an
/// unparseable ED intime/outtime. Other unparseable cells become missing and
/// are logged with their line number.
template <class Record>
std::vector<Record> parse_table_text(std::string_view text, const ParseOptions& options,
                                     IssueLog& log, std::string_view source = {});

template <class Record>
std::vector<Record> parse_table(const std::filesystem::path& path, const ParseOptions& options,
                                IssueLog& log);

/// Inverse of parse_table_text; writes the required columns in schema order.
template <class Record>
std::string serialize_table(const std::vector<Record>& records, const ParseOptions& options);

/// Parses the pain field: an integer 0..10, anything else is missing.
std::optional<double> parse_pain(std::string_view text);

/// Fails with MissingFile naming every absent table before anything is read.
void check_input_files(const std::filesystem::path& dir);

RawTables read_raw_tables(const std::filesystem::path& dir, const ParseOptions& options,
                          IssueLog& log, unsigned threads = 1);
void write_raw_tables(const std::filesystem::path& dir, const RawTables& tables,
                      const ParseOptions& options);

struct StayData {
  EdStayRecord stay;
  std::optional<TriageRecord> triage;
  std::vector<VitalSignRecord> vitals;  // ascending charttime
  std::vector<MedreconRecord> medrecon;
  std::vector<PyxisRecord> pyxis;

  friend bool operator==(const StayData&, const StayData&) = default;
};

struct SubjectData {
  PatientRecord patient;
  std::vector<std::size_t> stays;  // indices into LinkedCohort::stays, ascending intime
  std::vector<AdmissionRecord> admissions;  // ascending admittime
  std::vector<IcuStayRecord> icu_stays;     // ascending intime
  std::vector<DiagnosisRecord> diagnoses;   // by hadm_id, seq_num

  const AdmissionRecord* find_admission(std::int64_t hadm_id) const;

  friend bool operator==(const SubjectData&, const SubjectData&) = default;
};

struct LinkStats {
  std::size_t input_stays = 0;
  std::size_t dropped_missing_patient = 0;
  std::size_t dropped_missing_outtime = 0;
  std::size_t orphan_triage = 0;
  std::size_t orphan_vitalsign = 0;
  std::size_t orphan_medrecon = 0;
  std::size_t orphan_pyxis = 0;
  std::size_t duplicate_triage = 0;
  std::size_t unresolved_hadm = 0;
  std::size_t vitals_outside_window = 0;
  std::size_t inverted_stays = 0;

  std::size_t dropped_stays() const { return dropped_missing_patient + dropped_missing_outtime; }
  std::size_t orphans() const {
    return orphan_triage + orphan_vitalsign + orphan_medrecon + orphan_pyxis;
  }

  friend bool operator==(const LinkStats&, const LinkStats&) = default;
};

struct LinkedCohort {
  std::vector<StayData> stays;  // ascending stay_id
  std::map<std::int64_t, SubjectData> subjects;
  LinkStats stats;

  const SubjectData& subject_of(const StayData& stay) const;

  friend bool operator==(const LinkedCohort&, const LinkedCohort&) = default;
};

/// Roots the cohort at the ED stays and attaches every other table.
///
/// Errors: DuplicateKey when stay_id, subject_id (patients), hadm_id or ICU
/// stay id repeats. Stays without a patient row or without an outtime are
/// dropped; child rows whose stay_id has no root are dropped as orphans. Both
/// are counted in `stats` and logged.
LinkedCohort link_tables(RawTables tables, IssueLog& log);

}  // namespace edbench::ingest
