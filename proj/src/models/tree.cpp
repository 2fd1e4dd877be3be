#include <algorithm>
#include <limits>
#include <numeric>

#include "tree_builder.hpp"

namespace edbench::models {

double Tree::predict(const double* row) const {
  std::size_t i = 0;
  while (nodes[i].feature >= 0) {
    i = row[nodes[i].feature] <= nodes[i].value ? i + 1 : static_cast<std::size_t>(nodes[i].right);
  }
  return nodes[i].value;
}

std::size_t Tree::leaves() const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const Node& n) { return n.feature < 0; }));
}

namespace detail {

BinnedData BinnedData::build(const FeatureMatrix& X) {
  BinnedData b;
  b.rows = X.rows;
  b.cols = X.cols;
  b.codes.resize(X.cols);
  b.values.resize(X.cols);
  std::vector<double> col(X.rows);
  for (std::size_t c = 0; c < X.cols; ++c) {
    for (std::size_t r = 0; r < X.rows; ++r) col[r] = X.at(r, c);
    auto& v = b.values[c];
    v = col;
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    auto& codes = b.codes[c];
    codes.resize(X.rows);
    for (std::size_t r = 0; r < X.rows; ++r) {
      codes[r] = static_cast<std::uint32_t>(std::lower_bound(v.begin(), v.end(), col[r]) - v.begin());
    }
  }
  return b;
}

namespace {

struct Group {
  std::uint32_t code;
  double w;
  double s;
  std::size_t count;
};

struct Candidate {
  double score = -std::numeric_limits<double>::infinity();
  std::size_t feature = 0;
  std::uint32_t code = 0;  // rows with code <= this go left
  bool found = false;
};

class Builder {
 public:
  Builder(const BinnedData& data, const double* target, const double* weight, const TreeConfig& config,
          Rng* rng, const LeafValue& leaf, std::vector<double>* importance)
      : data_(data), target_(target), weight_(weight), config_(config), rng_(rng), leaf_(leaf),
        importance_(importance) {
    std::size_t max_bins = 0;
    for (const auto& v : data.values) max_bins = std::max(max_bins, v.size());
    hist_w_.resize(max_bins);
    hist_s_.resize(max_bins);
    hist_c_.resize(max_bins);
    order_.resize(data.cols);
    std::iota(order_.begin(), order_.end(), 0);
  }

  Tree run(std::vector<std::uint32_t> rows) {
    rows_ = std::move(rows);
    Tree tree;
    struct Task {
      std::size_t begin;
      std::size_t end;
      int depth;
      std::int32_t right_of;  // parent to patch, -1 for a left child or the root
    };
    std::vector<Task> stack{{0, rows_.size(), 0, -1}};
    while (!stack.empty()) {
      const Task task = stack.back();
      stack.pop_back();
      const auto index = static_cast<std::int32_t>(tree.nodes.size());
      if (task.right_of >= 0) tree.nodes[static_cast<std::size_t>(task.right_of)].right = index;
      tree.nodes.emplace_back();

      std::size_t mid = 0;
      const Candidate split = find_split(task.begin, task.end, task.depth);
      if (!split.found) {
        tree.nodes.back().value = leaf_(rows_.data() + task.begin, rows_.data() + task.end);
        continue;
      }
      const auto& codes = data_.codes[split.feature];
      auto first = rows_.begin() + static_cast<std::ptrdiff_t>(task.begin);
      auto last = rows_.begin() + static_cast<std::ptrdiff_t>(task.end);
      auto cut = std::stable_partition(first, last, [&](std::uint32_t r) { return codes[r] <= split.code; });
      mid = static_cast<std::size_t>(cut - rows_.begin());
      auto& node = tree.nodes.back();
      node.feature = static_cast<std::int32_t>(split.feature);
      node.value = data_.values[split.feature][split.code];
      stack.push_back({mid, task.end, task.depth + 1, index});
      stack.push_back({task.begin, mid, task.depth + 1, -1});
    }
    return tree;
  }

 private:
  Candidate find_split(std::size_t begin, std::size_t end, int depth) {
    Candidate best;
    const std::size_t n = end - begin;
    if (depth >= config_.max_depth || n < 2 * static_cast<std::size_t>(config_.min_samples_leaf)) return best;

    double W = 0.0;
    double S = 0.0;
    double tmin = std::numeric_limits<double>::infinity();
    double tmax = -tmin;
    for (std::size_t i = begin; i < end; ++i) {
      const auto r = rows_[i];
      W += weight_[r];
      S += weight_[r] * target_[r];
      tmin = std::min(tmin, target_[r]);
      tmax = std::max(tmax, target_[r]);
    }
    if (tmin == tmax) return best;  // pure node

    const std::size_t d = data_.cols;
    const bool subsample = config_.max_features > 0 && config_.max_features < d;
    std::size_t visited = 0;
    for (std::size_t i = 0; i < d; ++i) {
      if (subsample) {
        if (visited >= config_.max_features) break;
        std::swap(order_[i], order_[i + rng_->index(d - i)]);
      }
      const std::size_t j = order_[i];
      if (!collect_groups(j, begin, end)) continue;
      ++visited;
      scan(j, W, S, best);
    }
    if (best.found && importance_) {
      (*importance_)[best.feature] += std::max(0.0, best.score - S * S / W);
    }
    return best;
  }

  /// Fills groups_ with per-rank sums; false when the feature is constant here.
  bool collect_groups(std::size_t j, std::size_t begin, std::size_t end) {
    groups_.clear();
    const auto& codes = data_.codes[j];
    const std::size_t K = data_.values[j].size();
    if (K <= 1) return false;
    const std::size_t n = end - begin;
    if (K <= 2 * n) {
      std::fill_n(hist_w_.begin(), K, 0.0);
      std::fill_n(hist_s_.begin(), K, 0.0);
      std::fill_n(hist_c_.begin(), K, std::size_t{0});
      for (std::size_t i = begin; i < end; ++i) {
        const auto r = rows_[i];
        const auto k = codes[r];
        hist_w_[k] += weight_[r];
        hist_s_[k] += weight_[r] * target_[r];
        ++hist_c_[k];
      }
      for (std::size_t k = 0; k < K; ++k) {
        if (hist_c_[k] > 0) groups_.push_back({static_cast<std::uint32_t>(k), hist_w_[k], hist_s_[k], hist_c_[k]});
      }
    } else {
      sorted_.clear();
      for (std::size_t i = begin; i < end; ++i) sorted_.emplace_back(codes[rows_[i]], rows_[i]);
      std::sort(sorted_.begin(), sorted_.end());
      for (const auto& [k, r] : sorted_) {
        if (groups_.empty() || groups_.back().code != k) groups_.push_back({k, 0.0, 0.0, 0});
        auto& g = groups_.back();
        g.w += weight_[r];
        g.s += weight_[r] * target_[r];
        ++g.count;
      }
    }
    return groups_.size() > 1;
  }

  void scan(std::size_t j, double W, double S, Candidate& best) const {
    const auto min_leaf = static_cast<std::size_t>(config_.min_samples_leaf);
    std::size_t total = 0;
    for (const auto& g : groups_) total += g.count;
    double wl = 0.0;
    double sl = 0.0;
    std::size_t cl = 0;
    for (std::size_t g = 0; g + 1 < groups_.size(); ++g) {
      wl += groups_[g].w;
      sl += groups_[g].s;
      cl += groups_[g].count;
      if (cl < min_leaf || total - cl < min_leaf) continue;
      const double wr = W - wl;
      const double sr = S - sl;
      if (wl <= 0.0 || wr <= 0.0) continue;
      const double score = sl * sl / wl + sr * sr / wr;
      if (score > best.score) {
        best.score = score;
        best.feature = j;
        best.code = groups_[g].code;
        best.found = true;
      }
    }
  }

  const BinnedData& data_;
  const double* target_;
  const double* weight_;
  TreeConfig config_;
  Rng* rng_;
  const LeafValue& leaf_;
  std::vector<double>* importance_;

  std::vector<std::uint32_t> rows_;
  std::vector<std::size_t> order_;
  std::vector<double> hist_w_;
  std::vector<double> hist_s_;
  std::vector<std::size_t> hist_c_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> sorted_;
  std::vector<Group> groups_;
};

}  // namespace

Tree build_tree(const BinnedData& data, std::vector<std::uint32_t> rows, const double* target,
                const double* weight, const TreeConfig& config, Rng* rng, const LeafValue& leaf,
                std::vector<double>* importance) {
  if (importance) importance->assign(data.cols, 0.0);
  Builder builder(data, target, weight, config, rng, leaf, importance);
  return builder.run(std::move(rows));
}

}  // namespace detail
}  // namespace edbench::models
