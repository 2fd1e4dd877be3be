#pragma once

// Shared CART builder for the forest and boosting trainers.

#include <cstdint>
#include <functional>
#include <vector>

#include "edbench/common/random.hpp"
#include "edbench/models.hpp"

namespace edbench::models::detail {

/// Each feature replaced by the rank of its value among the distinct
/// training values. Splits are chosen on ranks and stored as real values, so
/// trees do not change under strictly increasing feature transforms.
struct BinnedData {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::vector<std::uint32_t>> codes;  // [feature][row]
  std::vector<std::vector<double>> values;        // [feature][rank]

  static BinnedData build(const FeatureMatrix& X);
};

struct TreeConfig {
  int max_depth = 32;
  int min_samples_leaf = 1;
  std::size_t max_features = 0;  // 0 or >= cols: every feature, in order
};

using LeafValue = std::function<double(const std::uint32_t* first, const std::uint32_t* last)>;

/// Grows one tree on `rows` (every row must have positive weight) by weighted
/// squared-error reduction of `target`. With binary targets this ranks
/// splits exactly like Gini impurity. `importance` (size cols) accumulates
/// the weighted impurity decrease per feature.
Tree build_tree(const BinnedData& data, std::vector<std::uint32_t> rows, const double* target,
                const double* weight, const TreeConfig& config, Rng* rng, const LeafValue& leaf,
                std::vector<double>* importance);

}  // namespace edbench::models::detail
