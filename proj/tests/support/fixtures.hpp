#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "edbench/common/time.hpp"
#include "edbench/ingest.hpp"
#include "edbench/models.hpp"
#include "edbench/synthdata.hpp"

namespace edbench::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline Timestamp ts(int y, unsigned mo, unsigned d, int h = 0, int mi = 0) { return make_timestamp(y, mo, d, h, mi); }

// Small hand-built source tables. Defaults describe an adult with a complete
// triage row; tests override the fields they care about.
ingest::PatientRecord patient(std::int64_t subject, int anchor_age = 50, int anchor_year = 2150);
ingest::EdStayRecord stay(std::int64_t subject, std::int64_t stay_id, Timestamp in, double hours,
                          std::optional<std::int64_t> hadm = std::nullopt);
ingest::TriageRecord triage(std::int64_t subject, std::int64_t stay_id, int acuity = 3,
                            std::string complaint = "chest pain");
ingest::AdmissionRecord admission(std::int64_t subject, std::int64_t hadm, Timestamp admit, double days);
ingest::DiagnosisRecord diagnosis(std::int64_t subject, std::int64_t hadm, std::string code, int version,
                                  int seq = 1);

/// n x d standard normal features, labels from `rule` applied to each row.
models::FeatureMatrix random_matrix(std::size_t n, std::size_t d, std::uint64_t seed,
                                    bool (*rule)(const double* row, std::size_t d, double noise));

/// Manifest f0..f{d-1}.
std::vector<std::string> numbered_manifest(std::size_t d);

/// Synthetic cohort with `visits` ED visits.
synthdata::SynthConfig synth_config(std::size_t visits, std::uint64_t seed);

std::string read_file(const std::filesystem::path& path);

/// Runs a shell command line and returns its exit status (-1 if it did not exit).
int run_command(const std::string& command_line);

}  // namespace edbench::testing
