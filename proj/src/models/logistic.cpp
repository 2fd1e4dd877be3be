#include <cmath>
#include <deque>

#include "edbench/common/error.hpp"
#include "edbench/models.hpp"

namespace edbench::models {

namespace {

double sigmoid(double x) {
  return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

double lr_objective(const std::vector<double>& Z, const std::vector<std::uint8_t>& y, std::size_t d,
                    const std::vector<double>& params, double C, std::vector<double>* grad) {
  const std::size_t n = y.size();
  const double b = params[d];
  double loss = 0.0;
  if (grad) grad->assign(d + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double* z = Z.data() + i * d;
    double s = b;
    for (std::size_t k = 0; k < d; ++k) s += params[k] * z[k];
    loss += softplus(s) - y[i] * s;
    if (grad) {
      const double r = sigmoid(s) - y[i];
      for (std::size_t k = 0; k < d; ++k) (*grad)[k] += r * z[k];
      (*grad)[d] += r;
    }
  }
  double penalty = 0.0;
  for (std::size_t k = 0; k < d; ++k) penalty += params[k] * params[k];
  const double inv_n = 1.0 / static_cast<double>(n);
  if (grad) {
    for (std::size_t k = 0; k < d; ++k) (*grad)[k] = ((*grad)[k] + params[k] / C) * inv_n;
    (*grad)[d] *= inv_n;
  }
  return (loss + penalty / (2.0 * C)) * inv_n;
}

TrainedModel train_lr(const FeatureMatrix& X, std::uint64_t seed, const LrParams& params) {
  if (!(params.C > 0.0) || params.max_iter < 0 || params.history < 1) {
    throw Error(ErrorCode::BadConfig, "logistic regression needs C > 0, max_iter >= 0, history >= 1");
  }
  if (X.labels.empty()) throw Error(ErrorCode::MissingColumn, "training matrix has no labels");
  TrainedModel m;
  m.kind = ModelKind::LR;
  m.seed = seed;
  m.params.lr = params;
  m.manifest = X.manifest;
  m.fingerprint = manifest_fingerprint(X.manifest);
  m.standardizer = Standardizer::fit(X);
  const auto Z = m.standardizer.transform(X);
  const std::size_t d = X.cols;

  auto objective = [&](const std::vector<double>& w, std::vector<double>* g) {
    const double f = lr_objective(Z, X.labels, d, w, params.C, g);
    if (!std::isfinite(f)) throw Error(ErrorCode::NonFiniteLoss, "logistic regression objective is not finite");
    return f;
  };

  // L-BFGS with a backtracking (step-halving) Armijo line search.
  std::vector<double> w(d + 1, 0.0);
  std::vector<double> g;
  double f = objective(w, &g);
  std::deque<std::pair<std::vector<double>, std::vector<double>>> memory;  // (s, y)
  std::vector<double> direction(d + 1);
  std::vector<double> trial(d + 1);
  std::vector<double> g_trial;
  int iter = 0;
  for (; iter < params.max_iter; ++iter) {
    double gmax = 0.0;
    for (double v : g) gmax = std::max(gmax, std::abs(v));
    if (gmax <= params.tol) break;

    // Two-loop recursion.
    direction = g;
    std::vector<double> alpha(memory.size());
    for (std::size_t k = memory.size(); k-- > 0;) {
      const auto& [s, yv] = memory[k];
      alpha[k] = dot(s, direction) / dot(yv, s);
      for (std::size_t i = 0; i <= d; ++i) direction[i] -= alpha[k] * yv[i];
    }
    if (!memory.empty()) {
      const auto& [s, yv] = memory.back();
      const double gamma = dot(s, yv) / dot(yv, yv);
      for (double& v : direction) v *= gamma;
    }
    for (std::size_t k = 0; k < memory.size(); ++k) {
      const auto& [s, yv] = memory[k];
      const double beta = dot(yv, direction) / dot(yv, s);
      for (std::size_t i = 0; i <= d; ++i) direction[i] += (alpha[k] - beta) * s[i];
    }
    for (double& v : direction) v = -v;
    double slope = dot(g, direction);
    if (!(slope < 0.0)) {
      memory.clear();
      for (std::size_t i = 0; i <= d; ++i) direction[i] = -g[i];
      slope = dot(g, direction);
    }

    double step = 1.0;
    double f_trial = 0.0;
    bool accepted = false;
    for (int halvings = 0; halvings < 60; ++halvings, step *= 0.5) {
      for (std::size_t i = 0; i <= d; ++i) trial[i] = w[i] + step * direction[i];
      f_trial = lr_objective(Z, X.labels, d, trial, params.C, &g_trial);
      if (std::isfinite(f_trial) && f_trial <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;

    std::vector<double> s(d + 1);
    std::vector<double> yv(d + 1);
    for (std::size_t i = 0; i <= d; ++i) {
      s[i] = trial[i] - w[i];
      yv[i] = g_trial[i] - g[i];
    }
    if (dot(s, yv) > 1e-12) {
      memory.emplace_back(std::move(s), std::move(yv));
      if (memory.size() > static_cast<std::size_t>(params.history)) memory.pop_front();
    }
    w.swap(trial);
    g.swap(g_trial);
    f = f_trial;
  }
  m.iterations = iter;
  m.coef.assign(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(d));
  m.intercept = w[d];
  return m;
}

}  // namespace edbench::models
