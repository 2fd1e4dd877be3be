#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "edbench/common/table.hpp"

namespace edbench::scores {

/// Half-open interval [low, high); infinite ends are allowed.
struct Band {
  double low;
  double high;
  int points;
};

struct Component {
  std::string name;
  /// "age", "map" (derived from sbp/dbp) or a vital sign name such as
  /// "heartrate" that is looked up as triage_<name> or ed_<name>.
  std::string variable;
  std::vector<Band> bands;  // ascending, contiguous

  int max_points() const;
};

struct Omitted {
  std::string name;
  std::string reason;
};

/// Declarative band table for one clinical score.
///
/// JSON layout:
///
///     {"name": "NEWS", "inputs": ["resprate", ...],
///      "components": [{"name": "heart_rate", "variable": "heartrate",
///                      "bands": [[null, 41, 3], [41, 51, 1], ...]}],
///      "omitted": [{"name": "avpu", "reason": "..."}]}
///
/// `null` is an open end. `inputs` are the source variables the score is
/// counted as consuming in the report.
struct ScoreDefinition {
  std::string name;
  std::vector<std::string> inputs;
  std::vector<Component> components;
  std::vector<Omitted> omitted;

  int max_total() const;

  static ScoreDefinition parse(std::string_view json_text);
  static ScoreDefinition load(const std::filesystem::path& path);
};

/// NEWS, NEWS2, MEWS, REMS, CART from the data directory.
std::vector<std::filesystem::path> shipped_score_paths();
std::vector<ScoreDefinition> load_scores(const std::vector<std::filesystem::path>& paths);

/// Points of the band containing `value`. Throws NoBand.
int band_points(double value, const Component& component);

enum class VitalsSource { Triage, Ed };

std::string_view to_string(VitalsSource source);

/// Mean arterial pressure estimate dbp + (sbp - dbp) / 3.
inline double mean_arterial_pressure(double sbp, double dbp) { return dbp + (sbp - dbp) / 3.0; }

/// Score total per row of `table`; a row with any missing input is missing.
std::vector<double> compute_scores(const ScoreDefinition& definition, const NumericTable& table,
                                   VitalsSource source);

/// Total for one row of `table`.
double compute_score(const ScoreDefinition& definition, const NumericTable& table, std::size_t row,
                     VitalsSource source);

/// 6 - acuity, so that a larger value means higher risk. Throws BadAcuity.
int esi_risk(double acuity);

}  // namespace edbench::scores
