#include <cmath>
#include <numeric>

#include "edbench/common/error.hpp"
#include "tree_builder.hpp"

namespace edbench::models {

namespace {

double sigmoid(double x) {
  return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

/// Binomial deviance: twice the mean negative log-likelihood.
double deviance(const std::vector<double>& F, const std::vector<std::uint8_t>& y) {
  double total = 0.0;
  for (std::size_t i = 0; i < F.size(); ++i) total += softplus(F[i]) - y[i] * F[i];
  return 2.0 * total / static_cast<double>(F.size());
}

}  // namespace

TrainedModel train_gb(const FeatureMatrix& X, std::uint64_t seed, const GbParams& params, IssueLog* log) {
  if (params.n_estimators < 0 || params.max_depth < 1 || !(params.learning_rate > 0.0)) {
    throw Error(ErrorCode::BadConfig, "gradient boosting needs n_estimators >= 0, max_depth >= 1, learning_rate > 0");
  }
  if (X.labels.empty()) throw Error(ErrorCode::MissingColumn, "training matrix has no labels");
  TrainedModel m;
  m.kind = ModelKind::GB;
  m.seed = seed;
  m.params.gb = params;
  m.manifest = X.manifest;
  m.fingerprint = manifest_fingerprint(X.manifest);

  const std::size_t n = X.rows;
  const double positives = std::accumulate(X.labels.begin(), X.labels.end(), 0.0);
  const double base = positives / static_cast<double>(n);
  if (positives == 0.0 || positives == static_cast<double>(n)) {
    if (log) log->warn("DegenerateLabels", "gradient boosting: one class in training labels, constant model");
    m.constant = base;
    return m;
  }
  m.init_score = std::log(base / (1.0 - base));

  const auto data = detail::BinnedData::build(X);
  detail::TreeConfig config;
  config.max_depth = params.max_depth;
  config.min_samples_leaf = 1;
  config.max_features = 0;

  std::vector<double> F(n, m.init_score);
  std::vector<double> p(n);
  std::vector<double> residual(n);
  const std::vector<double> weight(n, 1.0);
  std::vector<std::uint32_t> all(n);
  std::iota(all.begin(), all.end(), 0u);

  // Newton step per leaf: sum of residuals over sum of p(1-p).
  auto leaf = [&](const std::uint32_t* first, const std::uint32_t* last) {
    double num = 0.0;
    double den = 0.0;
    for (auto it = first; it != last; ++it) {
      num += residual[*it];
      den += p[*it] * (1.0 - p[*it]);
    }
    return den < 1e-150 ? 0.0 : params.learning_rate * num / den;
  };

  m.trees.reserve(static_cast<std::size_t>(params.n_estimators));
  m.deviance.push_back(deviance(F, X.labels));
  for (int stage = 0; stage < params.n_estimators; ++stage) {
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = sigmoid(F[i]);
      residual[i] = X.labels[i] - p[i];
    }
    Tree tree = detail::build_tree(data, all, residual.data(), weight.data(), config, nullptr, leaf, nullptr);
    for (std::size_t i = 0; i < n; ++i) F[i] += tree.predict(X.row(i));
    const double dev = deviance(F, X.labels);
    if (!std::isfinite(dev)) {
      throw Error(ErrorCode::NonFiniteLoss, "gradient boosting deviance at stage " + std::to_string(stage + 1));
    }
    m.deviance.push_back(dev);
    m.trees.push_back(std::move(tree));
  }
  return m;
}

}  // namespace edbench::models
