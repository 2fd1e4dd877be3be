#include "edbench/scores.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "edbench/common/csv.hpp"
#include "edbench/common/error.hpp"

namespace edbench::scores {

using nlohmann::json;

int Component::max_points() const {
  int best = 0;
  for (const auto& b : bands) best = std::max(best, b.points);
  return best;
}

int ScoreDefinition::max_total() const {
  int total = 0;
  for (const auto& c : components) total += c.max_points();
  return total;
}

ScoreDefinition ScoreDefinition::parse(std::string_view json_text) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  ScoreDefinition def;
  try {
    const auto doc = json::parse(json_text);
    def.name = doc.at("name").get<std::string>();
    def.inputs = doc.at("inputs").get<std::vector<std::string>>();
    for (const auto& c : doc.at("components")) {
      Component comp;
      comp.name = c.at("name").get<std::string>();
      comp.variable = c.at("variable").get<std::string>();
      for (const auto& b : c.at("bands")) {
        if (!b.is_array() || b.size() != 3) {
          throw Error(ErrorCode::BadConfig, def.name + "." + comp.name + ": band must be [low, high, points]");
        }
        comp.bands.push_back(Band{b[0].is_null() ? -kInf : b[0].get<double>(),
                                  b[1].is_null() ? kInf : b[1].get<double>(), b[2].get<int>()});
      }
      def.components.push_back(std::move(comp));
    }
    if (doc.contains("omitted")) {
      for (const auto& o : doc.at("omitted")) {
        def.omitted.push_back(Omitted{o.at("name").get<std::string>(), o.value("reason", "")});
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadConfig, std::string("score definition: ") + e.what());
  }
  for (const auto& comp : def.components) {
    const std::string where = def.name + "." + comp.name;
    if (comp.bands.empty()) throw Error(ErrorCode::BadConfig, where + ": no bands");
    for (std::size_t i = 0; i < comp.bands.size(); ++i) {
      const auto& b = comp.bands[i];
      if (!(b.low < b.high)) throw Error(ErrorCode::BadConfig, where + ": empty band");
      if (b.points < 0) throw Error(ErrorCode::BadConfig, where + ": negative points");
      if (i > 0 && comp.bands[i - 1].high != b.low) {
        throw Error(ErrorCode::BadConfig, where + ": bands must be ascending and contiguous");
      }
    }
  }
  return def;
}

ScoreDefinition ScoreDefinition::load(const std::filesystem::path& path) {
  return parse(csv::read_text_file(path));
}

std::vector<std::filesystem::path> shipped_score_paths() {
  const std::filesystem::path dir = std::filesystem::path(EDBENCH_DATA_DIR) / "scores";
  return {dir / "news.json", dir / "news2.json", dir / "mews.json", dir / "rems.json", dir / "cart.json"};
}

std::vector<ScoreDefinition> load_scores(const std::vector<std::filesystem::path>& paths) {
  std::vector<ScoreDefinition> out;
  for (const auto& p : paths) out.push_back(ScoreDefinition::load(p));
  return out;
}

int band_points(double value, const Component& component) {
  for (const auto& b : component.bands) {
    if (value >= b.low && value < b.high) return b.points;
  }
  throw Error(ErrorCode::NoBand, component.name + ": no band holds " + csv::format_number(value));
}

std::string_view to_string(VitalsSource source) {
  return source == VitalsSource::Triage ? "triage" : "ed";
}

namespace {

struct Inputs {
  std::vector<const std::vector<double>*> primary;
  std::vector<const std::vector<double>*> secondary;  // dbp for "map"
};

Inputs resolve(const ScoreDefinition& def, const NumericTable& table, VitalsSource source) {
  const std::string prefix = source == VitalsSource::Triage ? "triage_" : "ed_";
  Inputs in;
  for (const auto& c : def.components) {
    if (c.variable == "age") {
      in.primary.push_back(&table.column("age"));
      in.secondary.push_back(nullptr);
    } else if (c.variable == "map") {
      in.primary.push_back(&table.column(prefix + "sbp"));
      in.secondary.push_back(&table.column(prefix + "dbp"));
    } else {
      in.primary.push_back(&table.column(prefix + c.variable));
      in.secondary.push_back(nullptr);
    }
  }
  return in;
}

double total_at(const ScoreDefinition& def, const Inputs& in, std::size_t row) {
  int total = 0;
  for (std::size_t k = 0; k < def.components.size(); ++k) {
    double v = (*in.primary[k])[row];
    if (in.secondary[k]) v = mean_arterial_pressure(v, (*in.secondary[k])[row]);
    if (is_missing(v)) return kMissing;
    total += band_points(v, def.components[k]);
  }
  return total;
}

}  // namespace

std::vector<double> compute_scores(const ScoreDefinition& definition, const NumericTable& table,
                                   VitalsSource source) {
  const auto in = resolve(definition, table, source);
  std::vector<double> out(table.rows());
  for (std::size_t r = 0; r < table.rows(); ++r) out[r] = total_at(definition, in, r);
  return out;
}

double compute_score(const ScoreDefinition& definition, const NumericTable& table, std::size_t row,
                     VitalsSource source) {
  return total_at(definition, resolve(definition, table, source), row);
}

int esi_risk(double acuity) {
  if (is_missing(acuity) || acuity < 1 || acuity > 5 || std::floor(acuity) != acuity) {
    throw Error(ErrorCode::BadAcuity, "acuity must be an integer 1..5, got " + csv::format_number(acuity));
  }
  return 6 - static_cast<int>(acuity);
}

}  // namespace edbench::scores
