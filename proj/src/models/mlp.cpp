#include <algorithm>
#include <cmath>
#include <numeric>

#include "edbench/common/error.hpp"
#include "edbench/common/random.hpp"
#include "edbench/models.hpp"

namespace edbench::models {

namespace {

double sigmoid(double x) {
  return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

}  // namespace

std::vector<double> MlpNet::flatten() const {
  std::vector<double> p;
  p.reserve(parameter_count());
  p.insert(p.end(), w1.begin(), w1.end());
  p.insert(p.end(), b1.begin(), b1.end());
  p.insert(p.end(), w2.begin(), w2.end());
  p.push_back(b2);
  return p;
}

void MlpNet::unflatten(const std::vector<double>& p) {
  if (p.size() != parameter_count()) {
    throw Error(ErrorCode::BadConfig, "MLP parameter vector has the wrong length");
  }
  auto it = p.begin();
  w1.assign(it, it + static_cast<std::ptrdiff_t>(hidden * inputs));
  it += static_cast<std::ptrdiff_t>(hidden * inputs);
  b1.assign(it, it + static_cast<std::ptrdiff_t>(hidden));
  it += static_cast<std::ptrdiff_t>(hidden);
  w2.assign(it, it + static_cast<std::ptrdiff_t>(hidden));
  b2 = p.back();
}

double mlp_loss(const MlpNet& net, const double* Z, const std::uint8_t* y, std::size_t n,
                std::vector<double>* grad) {
  const std::size_t d = net.inputs;
  const std::size_t h = net.hidden;
  std::vector<double> pre(h);
  double loss = 0.0;
  double* gw1 = nullptr;
  double* gb1 = nullptr;
  double* gw2 = nullptr;
  if (grad) {
    grad->assign(net.parameter_count(), 0.0);
    gw1 = grad->data();
    gb1 = gw1 + h * d;
    gw2 = gb1 + h;
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* z = Z + i * d;
    double s = net.b2;
    for (std::size_t j = 0; j < h; ++j) {
      const double* wj = net.w1.data() + j * d;
      double a = net.b1[j];
      for (std::size_t k = 0; k < d; ++k) a += wj[k] * z[k];
      pre[j] = a;
      if (a > 0.0) s += net.w2[j] * a;
    }
    loss += softplus(s) - y[i] * s;
    if (!grad) continue;
    const double ds = (sigmoid(s) - y[i]) * inv_n;
    grad->back() += ds;
    for (std::size_t j = 0; j < h; ++j) {
      if (pre[j] <= 0.0) continue;
      gw2[j] += ds * pre[j];
      const double dpre = ds * net.w2[j];
      gb1[j] += dpre;
      double* gj = gw1 + j * d;
      for (std::size_t k = 0; k < d; ++k) gj[k] += dpre * z[k];
    }
  }
  return loss * inv_n;
}

TrainedModel train_mlp(const FeatureMatrix& X, std::uint64_t seed, const MlpParams& params) {
  if (params.hidden < 1 || params.batch_size < 1 || params.epochs < 0 || !(params.learning_rate > 0.0)) {
    throw Error(ErrorCode::BadConfig, "MLP needs hidden, batch_size >= 1, epochs >= 0, learning_rate > 0");
  }
  if (X.labels.empty()) throw Error(ErrorCode::MissingColumn, "training matrix has no labels");
  TrainedModel m;
  m.kind = ModelKind::MLP;
  m.seed = seed;
  m.params.mlp = params;
  m.manifest = X.manifest;
  m.fingerprint = manifest_fingerprint(X.manifest);
  m.standardizer = Standardizer::fit(X);
  const auto Z = m.standardizer.transform(X);
  const std::size_t d = X.cols;
  const auto h = static_cast<std::size_t>(params.hidden);

  Rng rng(seed);
  auto& net = m.net;
  net.inputs = d;
  net.hidden = h;
  // He-uniform for the ReLU layer, LeCun-uniform for the sigmoid output.
  const double a1 = std::sqrt(6.0 / static_cast<double>(std::max<std::size_t>(d, 1)));
  const double a2 = std::sqrt(3.0 / static_cast<double>(h));
  net.w1.resize(h * d);
  for (double& w : net.w1) w = rng.uniform(-a1, a1);
  net.b1.assign(h, 0.0);
  net.w2.resize(h);
  for (double& w : net.w2) w = rng.uniform(-a2, a2);
  net.b2 = 0.0;

  auto theta = net.flatten();
  std::vector<double> m1(theta.size(), 0.0);
  std::vector<double> m2(theta.size(), 0.0);
  std::vector<double> grad;
  std::vector<std::size_t> order(X.rows);
  std::iota(order.begin(), order.end(), 0);
  const auto batch = static_cast<std::size_t>(params.batch_size);
  std::vector<double> zb(batch * d);
  std::vector<std::uint8_t> yb(batch);
  std::uint64_t t = 0;
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < X.rows; start += batch) {
      const std::size_t count = std::min(batch, X.rows - start);
      for (std::size_t i = 0; i < count; ++i) {
        const std::size_t r = order[start + i];
        std::copy_n(Z.data() + r * d, d, zb.data() + i * d);
        yb[i] = X.labels[r];
      }
      net.unflatten(theta);
      const double loss = mlp_loss(net, zb.data(), yb.data(), count, &grad);
      if (!std::isfinite(loss)) {
        throw Error(ErrorCode::NonFiniteLoss, "MLP loss at epoch " + std::to_string(epoch + 1));
      }
      epoch_loss += loss * static_cast<double>(count);
      ++t;
      const double c1 = 1.0 - std::pow(params.beta1, static_cast<double>(t));
      const double c2 = 1.0 - std::pow(params.beta2, static_cast<double>(t));
      for (std::size_t k = 0; k < theta.size(); ++k) {
        m1[k] = params.beta1 * m1[k] + (1.0 - params.beta1) * grad[k];
        m2[k] = params.beta2 * m2[k] + (1.0 - params.beta2) * grad[k] * grad[k];
        theta[k] -= params.learning_rate * (m1[k] / c1) / (std::sqrt(m2[k] / c2) + params.epsilon);
      }
    }
    m.epoch_loss.push_back(X.rows ? epoch_loss / static_cast<double>(X.rows) : 0.0);
  }
  net.unflatten(theta);
  return m;
}

}  // namespace edbench::models
