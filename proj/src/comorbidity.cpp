#include "edbench/comorbidity.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

#include "edbench/common/csv.hpp"
#include "edbench/common/error.hpp"

namespace edbench::comorbidity {

std::string normalize_code(std::string_view code) {
  std::string out;
  out.reserve(code.size());
  for (char c : code) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    }
  }
  return out;
}

std::vector<std::string> expand_range(std::string_view token) {
  const auto dash = token.find('-');
  if (dash == std::string_view::npos) return {normalize_code(token)};
  const std::string first = normalize_code(token.substr(0, dash));
  const std::string last = normalize_code(token.substr(dash + 1));
  if (first.empty() || first.size() != last.size()) {
    throw Error(ErrorCode::BadConfig, "bad code range '" + std::string(token) + "'");
  }
  std::size_t common = 0;
  while (common < first.size() && first[common] == last[common]) ++common;
  const std::string head = first.substr(0, common);
  const std::string a = first.substr(common);
  const std::string b = last.substr(common);
  auto digits = [](const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
  };
  if (a.empty()) return {first};
  if (!digits(a) || !digits(b) || std::stoi(a) > std::stoi(b)) {
    throw Error(ErrorCode::BadConfig, "bad code range '" + std::string(token) + "'");
  }
  std::vector<std::string> out;
  for (int v = std::stoi(a); v <= std::stoi(b); ++v) {
    std::string tail = std::to_string(v);
    tail.insert(0, a.size() - tail.size(), '0');
    out.push_back(head + tail);
  }
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string> prefix_list(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  std::string token;
  while (in >> token) {
    for (auto& code : expand_range(token)) out.push_back(std::move(code));
  }
  return out;
}

}  // namespace

MappingTable MappingTable::parse(std::string_view text) {
  MappingTable table;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  auto fail = [&](const std::string& what) {
    throw Error(ErrorCode::BadConfig, "comorbidity map line " + std::to_string(line_no) + ": " + what);
  };
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail("unterminated block header");
      table.categories_.push_back(Category{std::string(trim(line.substr(1, line.size() - 2))), "", 1, {}, {}});
      continue;
    }
    if (table.categories_.empty()) fail("entry before the first block");
    auto colon = line.find(':');
    if (colon == std::string_view::npos) fail("expected 'key: value'");
    const auto key = trim(line.substr(0, colon));
    const auto value = trim(line.substr(colon + 1));
    auto& cat = table.categories_.back();
    if (key == "field") {
      cat.field = std::string(value);
    } else if (key == "level") {
      auto level = csv::parse_integer(value);
      if (!level || *level < 1) fail("level must be a positive integer");
      cat.level = static_cast<int>(*level);
    } else if (key == "icd9") {
      for (auto& p : prefix_list(value)) cat.icd9.push_back(std::move(p));
    } else if (key == "icd10") {
      for (auto& p : prefix_list(value)) cat.icd10.push_back(std::move(p));
    } else {
      fail("unknown key '" + std::string(key) + "'");
    }
  }
  table.build();
  return table;
}

MappingTable MappingTable::load(const std::filesystem::path& path) {
  return parse(csv::read_text_file(path));
}

std::filesystem::path MappingTable::default_path() {
  return std::filesystem::path(EDBENCH_DATA_DIR) / "icd_comorbidity_map.txt";
}

const MappingTable& MappingTable::shipped() {
  static const MappingTable table = load(default_path());
  return table;
}

void MappingTable::build() {
  std::map<std::string, std::vector<int>> levels;
  for (const auto& cat : categories_) {
    if (cat.field.empty()) throw Error(ErrorCode::BadConfig, "category '" + cat.name + "' has no field");
    if (cat.icd9.empty() || cat.icd10.empty()) {
      throw Error(ErrorCode::BadConfig, "category '" + cat.name + "' needs ICD-9 and ICD-10 prefixes");
    }
    Index index;
    if (cat.field.rfind("cci_", 0) == 0) {
      index = Index::Cci;
    } else if (cat.field.rfind("eci_", 0) == 0) {
      index = Index::Eci;
    } else {
      throw Error(ErrorCode::BadConfig, "field '" + cat.field + "' must start with cci_ or eci_");
    }
    auto& list = index == Index::Cci ? cci_ : eci_;
    auto it = std::find_if(list.begin(), list.end(), [&](const Field& f) { return f.name == cat.field; });
    if (it == list.end()) {
      list.push_back(Field{cat.field, index, cat.level});
    } else {
      it->max_level = std::max(it->max_level, cat.level);
    }
    levels[cat.field].push_back(cat.level);
  }
  for (auto& [field, list] : levels) {
    std::sort(list.begin(), list.end());
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (list[i] != static_cast<int>(i) + 1) {
        throw Error(ErrorCode::BadConfig, "field '" + field + "' levels must be 1..k without repeats");
      }
    }
  }

  for (const auto& cat : categories_) {
    const Index index = cat.field.rfind("cci_", 0) == 0 ? Index::Cci : Index::Eci;
    const auto& list = fields(index);
    const std::size_t pos = static_cast<std::size_t>(
        std::find_if(list.begin(), list.end(), [&](const Field& f) { return f.name == cat.field; }) -
        list.begin());
    for (int version : {9, 10}) {
      auto& idx = version == 9 ? icd9_ : icd10_;
      for (const auto& prefix : version == 9 ? cat.icd9 : cat.icd10) {
        auto& targets = idx.by_prefix[prefix];
        Target t{index, pos, cat.level};
        if (std::none_of(targets.begin(), targets.end(), [&](const Target& o) {
              return o.index == t.index && o.field == t.field && o.level == t.level;
            })) {
          targets.push_back(t);
        }
        idx.lengths.push_back(prefix.size());
      }
    }
  }
  for (auto* idx : {&icd9_, &icd10_}) {
    std::sort(idx->lengths.begin(), idx->lengths.end());
    idx->lengths.erase(std::unique(idx->lengths.begin(), idx->lengths.end()), idx->lengths.end());
  }
}

std::vector<MappingTable::Hit> MappingTable::match(std::string_view code, int version) const {
  if (version != 9 && version != 10) {
    throw Error(ErrorCode::UnknownVersion, "ICD version " + std::to_string(version) + " for code '" +
                                               std::string(code) + "'");
  }
  std::vector<Hit> hits;
  const auto& idx = prefixes(version);
  std::string key;
  for (std::size_t len : idx.lengths) {
    if (len > code.size()) break;
    key.assign(code.substr(0, len));
    auto it = idx.by_prefix.find(key);
    if (it == idx.by_prefix.end()) continue;
    for (const auto& t : it->second) hits.push_back(Hit{t.index, t.field, t.level});
  }
  return hits;
}

CodeSet collect_codes_in_lookback(const std::vector<ingest::DiagnosisRecord>& diagnoses,
                                  const std::vector<ingest::AdmissionRecord>& admissions,
                                  Timestamp ed_intime, std::optional<std::int64_t> index_hadm_id,
                                  const LookbackOptions& options, LookbackStats* stats) {
  const Timestamp start = years_before(ed_intime, options.years);
  std::unordered_map<std::int64_t, bool> eligible;
  for (const auto& a : admissions) {
    bool in_window = a.admittime && *a.admittime >= start && *a.admittime < ed_intime;
    if (index_hadm_id && a.hadm_id == *index_hadm_id) in_window = options.include_index_admission;
    eligible[a.hadm_id] = in_window;
  }
  CodeSet codes;
  for (const auto& d : diagnoses) {
    auto it = eligible.find(d.hadm_id);
    if (it == eligible.end()) {
      if (stats) ++stats->unresolved_hadm;
      continue;
    }
    if (!it->second) continue;
    if (d.icd_version != 9 && d.icd_version != 10) {
      if (stats) ++stats->unknown_version;
      continue;
    }
    codes.insert(Code{normalize_code(d.icd_code), d.icd_version});
  }
  return codes;
}

namespace {

std::vector<int> map_index(const MappingTable& table, const CodeSet& codes, Index index) {
  std::vector<int> out(table.fields(index).size(), 0);
  for (const auto& code : codes) {
    for (const auto& hit : table.match(code.code, code.version)) {
      if (hit.index == index) out[hit.field] = std::max(out[hit.field], hit.level);
    }
  }
  return out;
}

}  // namespace

std::vector<int> map_to_cci(const MappingTable& table, const CodeSet& codes) {
  return map_index(table, codes, Index::Cci);
}

std::vector<int> map_to_eci(const MappingTable& table, const CodeSet& codes) {
  return map_index(table, codes, Index::Eci);
}

}  // namespace edbench::comorbidity
