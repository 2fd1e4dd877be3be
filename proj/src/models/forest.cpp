#include <cmath>

#include "edbench/common/error.hpp"
#include "edbench/common/parallel.hpp"
#include "tree_builder.hpp"

namespace edbench::models {

namespace {

std::optional<double> single_class(const FeatureMatrix& X) {
  if (X.labels.empty()) throw Error(ErrorCode::MissingColumn, "training matrix has no labels");
  bool any0 = false;
  bool any1 = false;
  for (auto y : X.labels) (y ? any1 : any0) = true;
  if (any0 && any1) return std::nullopt;
  return any1 ? 1.0 : 0.0;
}

}  // namespace

TrainedModel train_rf(const FeatureMatrix& X, std::uint64_t seed, const RfParams& params,
                      unsigned threads, IssueLog* log) {
  if (params.n_trees < 1 || params.max_depth < 1 || params.min_samples_leaf < 1) {
    throw Error(ErrorCode::BadConfig, "random forest needs n_trees, max_depth, min_samples_leaf >= 1");
  }
  TrainedModel m;
  m.kind = ModelKind::RF;
  m.seed = seed;
  m.params.rf = params;
  m.manifest = X.manifest;
  m.fingerprint = manifest_fingerprint(X.manifest);
  m.importances.assign(X.cols, 0.0);
  if (auto c = single_class(X)) {
    if (log) log->warn("DegenerateLabels", "random forest: one class in training labels, constant model");
    m.constant = *c;
    return m;
  }

  const auto data = detail::BinnedData::build(X);
  std::vector<double> target(X.rows);
  for (std::size_t r = 0; r < X.rows; ++r) target[r] = X.labels[r];

  detail::TreeConfig config;
  config.max_depth = params.max_depth;
  config.min_samples_leaf = params.min_samples_leaf;
  config.max_features = params.max_features > 0
                            ? static_cast<std::size_t>(params.max_features)
                            : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(X.cols))));

  const auto n_trees = static_cast<std::size_t>(params.n_trees);
  m.trees.resize(n_trees);
  std::vector<std::vector<double>> importance(n_trees);
  parallel_for(n_trees, threads, [&](std::size_t t) {
    Rng rng(derive_seed(seed, t));
    std::vector<double> weight(X.rows, params.bootstrap ? 0.0 : 1.0);
    if (params.bootstrap) {
      for (std::size_t i = 0; i < X.rows; ++i) weight[rng.index(X.rows)] += 1.0;
    }
    std::vector<std::uint32_t> rows;
    for (std::size_t r = 0; r < X.rows; ++r) {
      if (weight[r] > 0.0) rows.push_back(static_cast<std::uint32_t>(r));
    }
    auto leaf = [&](const std::uint32_t* first, const std::uint32_t* last) {
      double w = 0.0;
      double s = 0.0;
      for (auto it = first; it != last; ++it) {
        w += weight[*it];
        s += weight[*it] * target[*it];
      }
      return s / w;
    };
    m.trees[t] = detail::build_tree(data, std::move(rows), target.data(), weight.data(), config, &rng,
                                    leaf, &importance[t]);
  });

  // Per-tree normalized impurity decrease, averaged, normalized again.
  for (const auto& imp : importance) {
    double total = 0.0;
    for (double v : imp) total += v;
    if (total <= 0.0) continue;
    for (std::size_t j = 0; j < X.cols; ++j) m.importances[j] += imp[j] / total;
  }
  double total = 0.0;
  for (double v : m.importances) total += v;
  if (total > 0.0) {
    for (double& v : m.importances) v /= total;
  }
  return m;
}

}  // namespace edbench::models
