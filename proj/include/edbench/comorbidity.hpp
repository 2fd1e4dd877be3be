#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "edbench/common/time.hpp"
#include "edbench/ingest.hpp"

namespace edbench::comorbidity {

enum class Index { Cci, Eci };

/// One block of the mapping file: a set of code prefixes that raises `field`
/// to at least `level`.
struct Category {
  std::string name;
  std::string field;
  int level = 1;
  std::vector<std::string> icd9;
  std::vector<std::string> icd10;
};

struct Field {
  std::string name;
  Index index = Index::Cci;
  int max_level = 1;  // 1 for binary fields
};

struct Code {
  std::string code;  // punctuation stripped, upper case
  int version = 0;

  friend auto operator<=>(const Code&, const Code&) = default;
};

using CodeSet = std::set<Code>;

/// "I21.4" -> "I214". Drops everything that is not a letter or digit.
std::string normalize_code(std::string_view code);

/// Prefix tables for both indices.
///
/// File format, one block per category:
///
///     [mild_liver_disease]
///     field: cci_liver_disease
///     level: 1
///     icd9: 07022 07023 570 571 5733
///     icd10: B18 K700-K703 K709
///
/// `#` starts a comment. Field names start with `cci_` or `eci_`, which picks
/// the index. `level` defaults to 1; a field with several blocks is ordinal
/// and its levels must be 1..k. A token `A-B` expands to every code between A
/// and B that shares their common prefix, e.g. `K700-K703` or `C00-C26`.
class MappingTable {
 public:
  static MappingTable parse(std::string_view text);
  static MappingTable load(const std::filesystem::path& path);
  /// data/icd_comorbidity_map.txt under the configured data directory.
  static const MappingTable& shipped();
  static std::filesystem::path default_path();

  const std::vector<Category>& categories() const { return categories_; }
  const std::vector<Field>& fields(Index index) const {
    return index == Index::Cci ? cci_ : eci_;
  }

  /// (field position within its index, level) for every category whose prefix
  /// list matches `code` (already normalized).
  struct Hit {
    Index index;
    std::size_t field;
    int level;
  };
  std::vector<Hit> match(std::string_view code, int version) const;

 private:
  struct Target {
    Index index;
    std::size_t field;
    int level;
  };
  struct PrefixIndex {
    std::unordered_map<std::string, std::vector<Target>> by_prefix;
    std::vector<std::size_t> lengths;  // ascending, distinct
  };

  void build();
  const PrefixIndex& prefixes(int version) const { return version == 9 ? icd9_ : icd10_; }

  std::vector<Category> categories_;
  std::vector<Field> cci_;
  std::vector<Field> eci_;
  PrefixIndex icd9_;
  PrefixIndex icd10_;
};

/// Expands one prefix token; `K700-K703` -> K700 K701 K702 K703.
std::vector<std::string> expand_range(std::string_view token);

struct LookbackStats {
  std::size_t unresolved_hadm = 0;
  std::size_t unknown_version = 0;
};

struct LookbackOptions {
  int years = 5;
  /// Keep the index admission's own diagnoses. Off by default because those
  /// codes are recorded after the ED visit and leak the outcome.
  bool include_index_admission = false;
};

/// Codes from admissions with admittime in [ed_intime - years, ed_intime).
/// Diagnoses whose hadm_id has no admission, or whose version is not 9/10,
/// are skipped and counted in `stats`.
CodeSet collect_codes_in_lookback(const std::vector<ingest::DiagnosisRecord>& diagnoses,
                                  const std::vector<ingest::AdmissionRecord>& admissions,
                                  Timestamp ed_intime, std::optional<std::int64_t> index_hadm_id,
                                  const LookbackOptions& options, LookbackStats* stats = nullptr);

/// One value per CCI field in table order: 0/1 for binary fields, the highest
/// matched level for ordinal ones. Throws UnknownVersion.
std::vector<int> map_to_cci(const MappingTable& table, const CodeSet& codes);
/// One 0/1 value per ECI field in table order. Throws UnknownVersion.
std::vector<int> map_to_eci(const MappingTable& table, const CodeSet& codes);

}  // namespace edbench::comorbidity
