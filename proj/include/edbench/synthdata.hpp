#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "edbench/ingest.hpp"

namespace edbench::synthdata {

struct VitalMoments {
  double mean = 0.0;
  double sd = 1.0;
};

/// Normal moments for one outcome group. Temperature in Celsius.
struct GroupVitals {
  VitalMoments temperature, heartrate, resprate, o2sat, sbp, dbp, pain;
};

struct SynthConfig {
  std::size_t n_patients = 1000;
  /// When set, patients are added until exactly this many visits exist and
  /// n_patients is ignored.
  std::optional<std::size_t> target_visits;
  double mean_visits_per_patient = 2.0;  // geometric, at least one visit

  double p_hospitalization = 0.4734;
  double p_critical = 0.0592;
  double p_reattendance = 0.0347;
  double p_icu_given_critical = 0.5568 / 0.5920;        // ICU 5.57% of visits
  double p_mortality_given_critical = 0.0089 / 0.0592;  // mortality 0.89% of visits

  double p_minor = 0.02;
  double p_missing_acuity = 0.01;
  double missing_rate = 0.02;   // per vital cell
  double outlier_rate = 0.005;  // per vital cell

  /// Triage moments per group; defaults follow a large adult ED cohort.
  GroupVitals discharged = {{36.68, 0.49}, {83.90, 16.32}, {17.30, 2.11}, {98.80, 2.00},
                            {135.14, 20.67}, {78.76, 13.76}, {4.67, 3.58}};
  GroupVitals hospitalized = {{36.75, 0.59}, {86.32, 18.56}, {17.87, 2.83}, {97.95, 2.75},
                              {134.51, 23.67}, {76.01, 15.57}, {3.58, 3.54}};
  GroupVitals critical = {{36.75, 0.66}, {90.73, 20.92}, {18.91, 4.32}, {97.30, 3.70},
                          {129.18, 26.21}, {73.53, 16.46}, {3.08, 3.02}};
  /// Moments of charted ED vitals; pain is unused.
  GroupVitals ed_discharged = {{36.72, 0.32}, {76.25, 12.84}, {16.92, 1.87}, {98.55, 2.83},
                               {127.62, 18.56}, {75.49, 12.68}, {0.0, 1.0}};
  GroupVitals ed_hospitalized = {{36.80, 0.42}, {80.24, 15.65}, {17.60, 2.96}, {97.79, 3.01},
                                 {127.13, 20.49}, {71.42, 14.17}, {0.0, 1.0}};
  GroupVitals ed_critical = {{36.85, 0.61}, {87.49, 20.13}, {19.29, 4.55}, {97.58, 3.78},
                             {122.38, 22.22}, {67.96, 15.13}, {0.0, 1.0}};

  std::uint64_t seed = 0;
};

/// Throws BadConfig for prevalences outside (0, 1) or no patients.
void validate(const SynthConfig& config);

struct GroundTruth {
  std::int64_t subject_id = 0;
  std::int64_t stay_id = 0;
  bool hospitalization = false;
  bool inhospital_mortality = false;
  bool icu_transfer_12h = false;
  bool critical = false;
  bool ed_revisit_3d = false;
};

struct SynthCohort {
  ingest::RawTables tables;
  std::vector<GroundTruth> truth;  // ascending stay_id
};

/// Outcome counts are fixed first (rounded prevalence times visits), then
/// timelines, admissions and ICU stays are laid out so that each planted
/// outcome is the only one the labelers can see.
SynthCohort generate_cohort(const SynthConfig& config);

std::string ground_truth_csv(const std::vector<GroundTruth>& truth);
std::vector<GroundTruth> read_ground_truth(const std::filesystem::path& path);

/// Writes the nine source tables plus ground_truth.csv.
void write_cohort(const std::filesystem::path& dir, const SynthCohort& cohort);

/// Overrides from a JSON object: n_patients, target_visits, seed, the p_*
/// rates, mean_visits_per_patient, missing_rate, outlier_rate.
SynthConfig parse_config(std::string_view json_text, SynthConfig base = {});

}  // namespace edbench::synthdata
