#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "edbench/common/log.hpp"
#include "edbench/common/table.hpp"

namespace edbench::models {

/// Row-major design matrix plus the column manifest it was built from.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;
  std::vector<std::string> manifest;
  std::vector<std::uint8_t> labels;  // empty when unlabeled
  std::string task;
  std::string vitals_source;
  std::string split;

  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  const double* row(std::size_t r) const { return values.data() + r * cols; }
};

/// One column name per line; `#` starts a comment.
std::vector<std::string> parse_manifest(std::string_view text);
std::vector<std::string> read_manifest(const std::filesystem::path& path);

/// Selects `manifest` columns from `table` in manifest order. Throws
/// MissingColumn for an absent column and MissingValue for a missing cell.
/// `label_column` may be empty for prediction-only matrices.
FeatureMatrix make_feature_matrix(const NumericTable& table, const std::vector<std::string>& manifest,
                                  std::string_view label_column);

/// FNV-1a over the manifest names; stored with each model.
std::uint64_t manifest_fingerprint(const std::vector<std::string>& manifest);

enum class ModelKind { LR, RF, GB, MLP };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view text);

struct LrParams {
  double C = 1.0;
  int max_iter = 100;
  double tol = 1e-6;
  int history = 10;
};

struct RfParams {
  int n_trees = 100;
  int max_depth = 32;
  int min_samples_leaf = 1;
  int max_features = 0;  // 0: ceil(sqrt(d))
  bool bootstrap = true;
};

struct GbParams {
  int n_estimators = 100;
  double learning_rate = 0.1;
  int max_depth = 3;
};

struct MlpParams {
  int hidden = 64;
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int batch_size = 200;
  int epochs = 20;
};

struct Hyperparameters {
  LrParams lr;
  RfParams rf;
  GbParams gb;
  MlpParams mlp;
};

/// z-score statistics from the training rows; zero spread is treated as 1.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer fit(const FeatureMatrix& X);
  std::vector<double> transform(const FeatureMatrix& X) const;
};

/// Binary tree in preorder: a split node's left child is the next node.
struct Tree {
  struct Node {
    std::int32_t feature = -1;  // -1 for a leaf
    std::int32_t right = -1;
    double value = 0.0;  // threshold for splits (x <= value goes left), output for leaves
  };
  std::vector<Node> nodes;

  double predict(const double* row) const;
  std::size_t leaves() const;
};

struct MlpNet {
  std::size_t inputs = 0;
  std::size_t hidden = 0;
  std::vector<double> w1;  // hidden x inputs
  std::vector<double> b1;
  std::vector<double> w2;
  double b2 = 0.0;

  std::vector<double> flatten() const;
  void unflatten(const std::vector<double>& params);
  std::size_t parameter_count() const { return hidden * inputs + 2 * hidden + 1; }
};

struct TrainedModel {
  ModelKind kind = ModelKind::LR;
  std::uint64_t seed = 0;
  Hyperparameters params;
  std::vector<std::string> manifest;
  std::uint64_t fingerprint = 0;

  /// Set when training labels held one class only.
  std::optional<double> constant;

  Standardizer standardizer;  // LR and MLP

  std::vector<double> coef;  // LR, on standardized inputs
  double intercept = 0.0;
  int iterations = 0;

  std::vector<Tree> trees;  // RF and GB
  double init_score = 0.0;  // GB log-odds of the base rate
  std::vector<double> importances;  // RF, normalized
  std::vector<double> deviance;     // GB training deviance at init, then after each stage

  MlpNet net;
  std::vector<double> epoch_loss;  // MLP

  friend bool operator==(const TrainedModel&, const TrainedModel&);
};

/// Mean logistic loss plus ||w||^2 / (2 C n) on standardized rows `Z`
/// (row-major n x d). `params` holds d weights then the intercept; the
/// gradient is written to `grad` when given.
double lr_objective(const std::vector<double>& Z, const std::vector<std::uint8_t>& y, std::size_t d,
                    const std::vector<double>& params, double C, std::vector<double>* grad);

/// Mean binary cross-entropy of `net` on the first `n` rows of `Z`
/// (row-major). Gradient in flatten() order when `grad` is given.
double mlp_loss(const MlpNet& net, const double* Z, const std::uint8_t* y, std::size_t n,
                std::vector<double>* grad);

TrainedModel train_lr(const FeatureMatrix& X, std::uint64_t seed, const LrParams& params = {});
TrainedModel train_rf(const FeatureMatrix& X, std::uint64_t seed, const RfParams& params = {},
                      unsigned threads = 1, IssueLog* log = nullptr);
TrainedModel train_gb(const FeatureMatrix& X, std::uint64_t seed, const GbParams& params = {},
                      IssueLog* log = nullptr);
TrainedModel train_mlp(const FeatureMatrix& X, std::uint64_t seed, const MlpParams& params = {});

TrainedModel train(ModelKind kind, const FeatureMatrix& X, std::uint64_t seed,
                   const Hyperparameters& params, unsigned threads = 1, IssueLog* log = nullptr);

/// Throws ManifestMismatch when X was built from a different manifest.
std::vector<double> predict_proba(const TrainedModel& model, const FeatureMatrix& X);

/// Ranked (variable, importance), descending, ties in manifest order.
/// Throws WrongKind for anything but RF.
std::vector<std::pair<std::string, double>> rf_variable_importance(const TrainedModel& model);

/// Hyperparameter overrides from a JSON object such as {"rf": {"n_trees": 50}}.
Hyperparameters parse_hyperparameters(std::string_view json_text, Hyperparameters base = {});
std::string hyperparameters_json(const Hyperparameters& params);

/// Model file: one line of JSON (kind, hyperparameters, manifest,
/// fingerprint, parameters), then for tree models a binary block of nodes.
std::string serialize_model(const TrainedModel& model);
TrainedModel deserialize_model(std::string_view bytes);
void save_model(const std::filesystem::path& path, const TrainedModel& model);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace edbench::models
