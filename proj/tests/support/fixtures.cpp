#include "support/fixtures.hpp"

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include "edbench/common/random.hpp"

namespace edbench::testing {

namespace fs = std::filesystem;

TempDir::TempDir() {
  std::string pattern = (fs::temp_directory_path() / "edbench_test_XXXXXX").string();
  if (::mkdtemp(pattern.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
  path_ = pattern;
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

ingest::PatientRecord patient(std::int64_t subject, int anchor_age, int anchor_year) {
  ingest::PatientRecord p;
  p.subject_id = subject;
  p.gender = ingest::Gender::Female;
  p.anchor_age = anchor_age;
  p.anchor_year = anchor_year;
  return p;
}

ingest::EdStayRecord stay(std::int64_t subject, std::int64_t stay_id, Timestamp in, double hours,
                          std::optional<std::int64_t> hadm) {
  ingest::EdStayRecord s;
  s.subject_id = subject;
  s.stay_id = stay_id;
  s.hadm_id = hadm;
  s.intime = in;
  s.outtime = hours_after(in, hours);
  s.disposition = hadm ? "ADMITTED" : "HOME";
  return s;
}

ingest::TriageRecord triage(std::int64_t subject, std::int64_t stay_id, int acuity, std::string complaint) {
  ingest::TriageRecord t;
  t.subject_id = subject;
  t.stay_id = stay_id;
  t.vitals = {37.0, 80.0, 16.0, 98.0, 120.0, 80.0};
  t.pain = 3.0;
  t.acuity = acuity;
  t.chiefcomplaint = std::move(complaint);
  return t;
}

ingest::AdmissionRecord admission(std::int64_t subject, std::int64_t hadm, Timestamp admit, double days) {
  ingest::AdmissionRecord a;
  a.subject_id = subject;
  a.hadm_id = hadm;
  a.admittime = admit;
  a.dischtime = hours_after(admit, days * 24.0);
  return a;
}

ingest::DiagnosisRecord diagnosis(std::int64_t subject, std::int64_t hadm, std::string code, int version, int seq) {
  ingest::DiagnosisRecord d;
  d.subject_id = subject;
  d.hadm_id = hadm;
  d.seq_num = seq;
  d.icd_code = std::move(code);
  d.icd_version = version;
  return d;
}

models::FeatureMatrix random_matrix(std::size_t n, std::size_t d, std::uint64_t seed,
                                    bool (*rule)(const double* row, std::size_t d, double noise)) {
  Rng rng(seed);
  models::FeatureMatrix X;
  X.rows = n;
  X.cols = d;
  X.values.resize(n * d);
  for (double& v : X.values) v = rng.normal();
  X.labels.resize(n);
  for (std::size_t r = 0; r < n; ++r) X.labels[r] = rule(X.row(r), d, rng.normal()) ? 1 : 0;
  X.manifest = numbered_manifest(d);
  return X;
}

std::vector<std::string> numbered_manifest(std::size_t d) {
  std::vector<std::string> m;
  for (std::size_t c = 0; c < d; ++c) m.push_back("f" + std::to_string(c));
  return m;
}

synthdata::SynthConfig synth_config(std::size_t visits, std::uint64_t seed) {
  synthdata::SynthConfig c;
  c.target_visits = visits;
  c.seed = seed;
  return c;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_command(const std::string& command_line) {
  const int status = std::system(command_line.c_str());
  if (status == -1 || !WIFEXITED(status)) return -1;
  return WEXITSTATUS(status);
}

}  // namespace edbench::testing
