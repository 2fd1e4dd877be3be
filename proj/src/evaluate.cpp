#include "edbench/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "edbench/common/error.hpp"
#include "edbench/common/parallel.hpp"
#include "edbench/common/random.hpp"

namespace edbench::evaluate {

namespace {

void check_sizes(Scores scores, Labels labels) {
  if (scores.size() != labels.size()) {
    throw Error(ErrorCode::MalformedRow, "scores and labels differ in length");
  }
}

std::pair<std::size_t, std::size_t> class_counts(Labels labels) {
  std::size_t pos = 0;
  for (auto y : labels) pos += y ? 1 : 0;
  return {pos, labels.size() - pos};
}

void require_both(Labels labels, const char* what) {
  const auto [pos, neg] = class_counts(labels);
  if (pos == 0 || neg == 0) {
    throw Error(ErrorCode::OneClassOnly, std::string(what) + " needs both classes, got " + std::to_string(pos) +
                                             " positives and " + std::to_string(neg) + " negatives");
  }
}

std::vector<std::size_t> descending_order(Scores scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

}  // namespace

double auroc(Scores scores, Labels labels) {
  check_sizes(scores, labels);
  require_both(labels, "AUROC");
  const auto [npos, nneg] = class_counts(labels);
  const auto order = descending_order(scores);
  // Walk groups of tied scores from the top; each positive beats every
  // negative still below it.
  double wins = 0.0;
  std::size_t neg_above = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    std::size_t pos_g = 0;
    std::size_t neg_g = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      (labels[order[j]] ? pos_g : neg_g)++;
      ++j;
    }
    const double below = static_cast<double>(nneg - neg_above - neg_g);
    wins += static_cast<double>(pos_g) * (below + 0.5 * static_cast<double>(neg_g));
    neg_above += neg_g;
    i = j;
  }
  return wins / (static_cast<double>(npos) * static_cast<double>(nneg));
}

double auprc(Scores scores, Labels labels) {
  check_sizes(scores, labels);
  const auto [npos, nneg] = class_counts(labels);
  (void)nneg;
  if (npos == 0) throw Error(ErrorCode::NoPositives, "AUPRC needs at least one positive label");
  const auto order = descending_order(scores);
  double ap = 0.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const std::size_t prev_tp = tp;
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      (labels[order[j]] ? tp : fp)++;
      ++j;
    }
    if (tp != prev_tp) {
      ap += (static_cast<double>(tp - prev_tp) / static_cast<double>(npos)) *
            (static_cast<double>(tp) / static_cast<double>(tp + fp));
    }
    i = j;
  }
  return ap;
}

std::vector<RocPoint> roc_curve(Scores scores, Labels labels) {
  check_sizes(scores, labels);
  require_both(labels, "ROC curve");
  const auto [npos, nneg] = class_counts(labels);
  const auto order = descending_order(scores);
  std::vector<RocPoint> curve;
  curve.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double s = scores[order[i]];
    while (i < order.size() && scores[order[i]] == s) {
      (labels[order[i]] ? tp : fp)++;
      ++i;
    }
    curve.push_back({static_cast<double>(fp) / static_cast<double>(nneg),
                     static_cast<double>(tp) / static_cast<double>(npos), s});
  }
  return curve;
}

double optimal_cutoff(const std::vector<RocPoint>& curve) {
  double best = std::numeric_limits<double>::infinity();
  double threshold = std::numeric_limits<double>::quiet_NaN();
  for (const auto& p : curve) {
    if (std::isinf(p.threshold)) continue;
    const double d = std::hypot(1.0 - p.tpr, p.fpr);
    // <= so that a tie moves to the later, lower threshold.
    if (d <= best) {
      best = d;
      threshold = p.threshold;
    }
  }
  if (std::isnan(threshold)) throw Error(ErrorCode::OneClassOnly, "ROC curve has no finite threshold");
  return threshold;
}

SensSpec sens_spec_at(Scores scores, Labels labels, double threshold) {
  check_sizes(scores, labels);
  require_both(labels, "sensitivity/specificity");
  std::size_t tp = 0, fn = 0, tn = 0, fp = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] >= threshold;
    if (labels[i]) {
      (predicted ? tp : fn)++;
    } else {
      (predicted ? fp : tn)++;
    }
  }
  return {static_cast<double>(tp) / static_cast<double>(tp + fn),
          static_cast<double>(tn) / static_cast<double>(tn + fp)};
}

double percentile(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw Error(ErrorCode::BadConfig, "percentile of an empty sample");
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

Interval bootstrap_ci(const Metric& metric, Scores scores, Labels labels, int B, std::uint64_t seed,
                      unsigned threads) {
  check_sizes(scores, labels);
  if (B < 1) throw Error(ErrorCode::BadConfig, "bootstrap needs B >= 1");
  const std::size_t n = scores.size();
  if (n == 0) throw Error(ErrorCode::OneClassOnly, "bootstrap of an empty sample");

  // Draws are sequential so which resamples get redrawn never depends on the
  // thread count; only metric evaluation runs in parallel.
  std::vector<std::uint64_t> accepted;
  const auto limit = static_cast<std::uint64_t>(B) * 10;
  std::vector<std::size_t> idx(n);
  for (std::uint64_t attempt = 0; accepted.size() < static_cast<std::size_t>(B); ++attempt) {
    if (attempt >= limit) {
      throw Error(ErrorCode::ResampleExhausted, "only " + std::to_string(accepted.size()) + " of " +
                                                    std::to_string(B) + " bootstrap resamples held both classes after " +
                                                    std::to_string(limit) + " draws");
    }
    Rng rng(derive_seed(seed, attempt));
    bool pos = false;
    bool neg = false;
    for (std::size_t i = 0; i < n; ++i) (labels[rng.index(n)] ? pos : neg) = true;
    if (pos && neg) accepted.push_back(attempt);
  }

  std::vector<double> values(accepted.size());
  parallel_for(accepted.size(), threads, [&](std::size_t b) {
    Rng rng(derive_seed(seed, accepted[b]));
    std::vector<double> s(n);
    std::vector<std::uint8_t> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto k = rng.index(n);
      s[i] = scores[k];
      y[i] = labels[k];
    }
    values[b] = metric(s, y);
  });
  std::sort(values.begin(), values.end());
  return {percentile(values, 0.025), percentile(values, 0.975)};
}

MeanSd mean_sd(const std::vector<double>& values) {
  MeanSd r;
  double sum = 0.0;
  for (double v : values) {
    if (is_missing(v)) continue;
    sum += v;
    ++r.n;
  }
  if (r.n == 0) return {kMissing, kMissing, 0};
  r.mean = sum / static_cast<double>(r.n);
  if (r.n > 1) {
    double ss = 0.0;
    for (double v : values) {
      if (!is_missing(v)) ss += (v - r.mean) * (v - r.mean);
    }
    r.sd = std::sqrt(ss / static_cast<double>(r.n - 1));
  }
  return r;
}

ModelResult evaluate_model(const std::string& task, const std::string& model, Scores scores, Labels labels,
                           double runtime_seconds, int variables, const EvalOptions& options) {
  ModelResult r;
  r.task = task;
  r.model = model;
  r.runtime_seconds = runtime_seconds;
  r.variables = variables;
  r.threshold = optimal_cutoff(roc_curve(scores, labels));
  const double cut = r.threshold;

  auto fill = [&](MetricCi& out, const Metric& metric, std::uint64_t stream) {
    out.value = metric(scores, labels);
    const auto ci = bootstrap_ci(metric, scores, labels, options.bootstrap, derive_seed(options.seed, stream),
                                 options.threads);
    out.low = std::min(ci.low, out.value);
    out.high = std::max(ci.high, out.value);
  };
  fill(r.auroc, [](Scores s, Labels y) { return auroc(s, y); }, 1);
  fill(r.auprc, [](Scores s, Labels y) { return auprc(s, y); }, 2);
  fill(r.sensitivity, [cut](Scores s, Labels y) { return sens_spec_at(s, y, cut).sensitivity; }, 3);
  fill(r.specificity, [cut](Scores s, Labels y) { return sens_spec_at(s, y, cut).specificity; }, 4);
  return r;
}

EvalReport build_report(std::vector<ModelResult> results) {
  for (const auto& r : results) {
    for (const MetricCi* m : {&r.auroc, &r.auprc, &r.sensitivity, &r.specificity}) {
      const bool ok = m->low >= 0.0 && m->high <= 1.0 && m->low <= m->value && m->value <= m->high;
      if (!ok) {
        throw Error(ErrorCode::MalformedRow, "metric out of range or outside its interval for " + r.task + "/" +
                                                 r.model);
      }
    }
  }
  return {std::move(results)};
}

}  // namespace edbench::evaluate
