#include <algorithm>
#include <cmath>

#include "edbench/common/csv.hpp"
#include "edbench/common/error.hpp"
#include "edbench/models.hpp"

namespace edbench::models {

std::vector<std::string> parse_manifest(std::string_view text) {
  std::vector<std::string> names;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.remove_suffix(1);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.front()))) line.remove_prefix(1);
    if (line.empty()) continue;
    if (std::find(names.begin(), names.end(), line) != names.end()) {
      throw Error(ErrorCode::BadConfig, "manifest lists '" + std::string(line) + "' twice");
    }
    names.emplace_back(line);
  }
  return names;
}

std::vector<std::string> read_manifest(const std::filesystem::path& path) {
  return parse_manifest(csv::read_text_file(path));
}

FeatureMatrix make_feature_matrix(const NumericTable& table, const std::vector<std::string>& manifest,
                                  std::string_view label_column) {
  FeatureMatrix X;
  X.rows = table.rows();
  X.cols = manifest.size();
  X.manifest = manifest;
  X.values.resize(X.rows * X.cols);
  for (std::size_t c = 0; c < X.cols; ++c) {
    const auto& col = table.column(manifest[c]);
    for (std::size_t r = 0; r < X.rows; ++r) {
      if (is_missing(col[r])) {
        throw Error(ErrorCode::MissingValue, "column '" + manifest[c] + "' row " + std::to_string(r) +
                                                 " is missing; impute before modeling");
      }
      X.values[r * X.cols + c] = col[r];
    }
  }
  if (!label_column.empty()) {
    const auto& y = table.column(label_column);
    X.labels.resize(X.rows);
    for (std::size_t r = 0; r < X.rows; ++r) {
      if (is_missing(y[r])) throw Error(ErrorCode::MissingValue, std::string(label_column) + " is missing");
      X.labels[r] = y[r] != 0.0 ? 1 : 0;
    }
  }
  return X;
}

std::uint64_t manifest_fingerprint(const std::vector<std::string>& manifest) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const auto& name : manifest) {
    for (char c : name) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ull;
    }
    h ^= '\n';
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::LR: return "LR";
    case ModelKind::RF: return "RF";
    case ModelKind::GB: return "GB";
    case ModelKind::MLP: return "MLP";
  }
  return "LR";
}

ModelKind parse_model_kind(std::string_view text) {
  std::string t(text);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::toupper(c); });
  if (t == "LR") return ModelKind::LR;
  if (t == "RF") return ModelKind::RF;
  if (t == "GB") return ModelKind::GB;
  if (t == "MLP") return ModelKind::MLP;
  throw Error(ErrorCode::BadConfig, "unknown model kind '" + std::string(text) + "'");
}

Standardizer Standardizer::fit(const FeatureMatrix& X) {
  Standardizer s;
  s.mean.assign(X.cols, 0.0);
  s.scale.assign(X.cols, 1.0);
  if (X.rows == 0) return s;
  const double n = static_cast<double>(X.rows);
  for (std::size_t r = 0; r < X.rows; ++r) {
    for (std::size_t c = 0; c < X.cols; ++c) s.mean[c] += X.at(r, c);
  }
  for (auto& m : s.mean) m /= n;
  std::vector<double> ss(X.cols, 0.0);
  for (std::size_t r = 0; r < X.rows; ++r) {
    for (std::size_t c = 0; c < X.cols; ++c) {
      const double d = X.at(r, c) - s.mean[c];
      ss[c] += d * d;
    }
  }
  for (std::size_t c = 0; c < X.cols; ++c) {
    const double sd = std::sqrt(ss[c] / n);
    s.scale[c] = sd > 0.0 ? sd : 1.0;
  }
  return s;
}

std::vector<double> Standardizer::transform(const FeatureMatrix& X) const {
  std::vector<double> Z(X.values.size());
  for (std::size_t r = 0; r < X.rows; ++r) {
    for (std::size_t c = 0; c < X.cols; ++c) {
      Z[r * X.cols + c] = (X.at(r, c) - mean[c]) / scale[c];
    }
  }
  return Z;
}

}  // namespace edbench::models
