#include <algorithm>
#include <cmath>
#include <cstring>
#include <json.hpp>
#include <numeric>

#include "edbench/common/csv.hpp"
#include "edbench/common/error.hpp"
#include "edbench/models.hpp"

namespace edbench::models {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "edbench-model";
constexpr int kFormatVersion = 1;

double sigmoid(double x) {
  return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

void check_manifest(const TrainedModel& model, const FeatureMatrix& X) {
  if (X.cols != model.manifest.size() || manifest_fingerprint(X.manifest) != model.fingerprint) {
    throw Error(ErrorCode::ManifestMismatch,
                "feature manifest does not match the one the " + std::string(to_string(model.kind)) +
                    " model was trained on");
  }
}

template <typename T>
void read_into(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) throw Error(ErrorCode::BadConfig, where + " must be a JSON object");
  for (const auto& [key, value] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      throw Error(ErrorCode::BadConfig, "unknown hyperparameter " + where + "." + key);
    }
  }
}

json to_json(const Hyperparameters& p) {
  return {
      {"lr", {{"C", p.lr.C}, {"max_iter", p.lr.max_iter}, {"tol", p.lr.tol}, {"history", p.lr.history}}},
      {"rf",
       {{"n_trees", p.rf.n_trees},
        {"max_depth", p.rf.max_depth},
        {"min_samples_leaf", p.rf.min_samples_leaf},
        {"max_features", p.rf.max_features},
        {"bootstrap", p.rf.bootstrap}}},
      {"gb",
       {{"n_estimators", p.gb.n_estimators}, {"learning_rate", p.gb.learning_rate}, {"max_depth", p.gb.max_depth}}},
      {"mlp",
       {{"hidden", p.mlp.hidden},
        {"learning_rate", p.mlp.learning_rate},
        {"beta1", p.mlp.beta1},
        {"beta2", p.mlp.beta2},
        {"epsilon", p.mlp.epsilon},
        {"batch_size", p.mlp.batch_size},
        {"epochs", p.mlp.epochs}}},
  };
}

Hyperparameters from_json(const json& doc, Hyperparameters p) {
  check_keys(doc, {"lr", "rf", "gb", "mlp"}, "hyperparameters");
  if (doc.contains("lr")) {
    const auto& o = doc["lr"];
    check_keys(o, {"C", "max_iter", "tol", "history"}, "lr");
    read_into(o, "C", p.lr.C);
    read_into(o, "max_iter", p.lr.max_iter);
    read_into(o, "tol", p.lr.tol);
    read_into(o, "history", p.lr.history);
  }
  if (doc.contains("rf")) {
    const auto& o = doc["rf"];
    check_keys(o, {"n_trees", "max_depth", "min_samples_leaf", "max_features", "bootstrap"}, "rf");
    read_into(o, "n_trees", p.rf.n_trees);
    read_into(o, "max_depth", p.rf.max_depth);
    read_into(o, "min_samples_leaf", p.rf.min_samples_leaf);
    read_into(o, "max_features", p.rf.max_features);
    read_into(o, "bootstrap", p.rf.bootstrap);
  }
  if (doc.contains("gb")) {
    const auto& o = doc["gb"];
    check_keys(o, {"n_estimators", "learning_rate", "max_depth"}, "gb");
    read_into(o, "n_estimators", p.gb.n_estimators);
    read_into(o, "learning_rate", p.gb.learning_rate);
    read_into(o, "max_depth", p.gb.max_depth);
  }
  if (doc.contains("mlp")) {
    const auto& o = doc["mlp"];
    check_keys(o, {"hidden", "learning_rate", "beta1", "beta2", "epsilon", "batch_size", "epochs"}, "mlp");
    read_into(o, "hidden", p.mlp.hidden);
    read_into(o, "learning_rate", p.mlp.learning_rate);
    read_into(o, "beta1", p.mlp.beta1);
    read_into(o, "beta2", p.mlp.beta2);
    read_into(o, "epsilon", p.mlp.epsilon);
    read_into(o, "batch_size", p.mlp.batch_size);
    read_into(o, "epochs", p.mlp.epochs);
  }
  return p;
}

bool same_nodes(const std::vector<Tree>& a, const std::vector<Tree>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t t = 0; t < a.size(); ++t) {
    const auto& x = a[t].nodes;
    const auto& y = b[t].nodes;
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i].feature != y[i].feature || x[i].right != y[i].right || x[i].value != y[i].value) return false;
    }
  }
  return true;
}

// Node records: int32 feature, int32 right, float64 value, host byte order.
constexpr std::size_t kNodeBytes = 16;

void append_pod(std::string& out, const void* p, std::size_t n) { out.append(static_cast<const char*>(p), n); }

}  // namespace

bool operator==(const TrainedModel& a, const TrainedModel& b) {
  return a.kind == b.kind && a.seed == b.seed && to_json(a.params) == to_json(b.params) &&
         a.manifest == b.manifest && a.fingerprint == b.fingerprint && a.constant == b.constant &&
         a.standardizer.mean == b.standardizer.mean && a.standardizer.scale == b.standardizer.scale &&
         a.coef == b.coef && a.intercept == b.intercept && a.iterations == b.iterations &&
         same_nodes(a.trees, b.trees) && a.init_score == b.init_score && a.importances == b.importances &&
         a.deviance == b.deviance && a.net.inputs == b.net.inputs && a.net.hidden == b.net.hidden &&
         a.net.w1 == b.net.w1 && a.net.b1 == b.net.b1 && a.net.w2 == b.net.w2 && a.net.b2 == b.net.b2 &&
         a.epoch_loss == b.epoch_loss;
}

TrainedModel train(ModelKind kind, const FeatureMatrix& X, std::uint64_t seed, const Hyperparameters& params,
                   unsigned threads, IssueLog* log) {
  TrainedModel m;
  switch (kind) {
    case ModelKind::LR: m = train_lr(X, seed, params.lr); break;
    case ModelKind::RF: m = train_rf(X, seed, params.rf, threads, log); break;
    case ModelKind::GB: m = train_gb(X, seed, params.gb, log); break;
    case ModelKind::MLP: m = train_mlp(X, seed, params.mlp); break;
  }
  m.params = params;
  return m;
}

std::vector<double> predict_proba(const TrainedModel& model, const FeatureMatrix& X) {
  check_manifest(model, X);
  std::vector<double> out(X.rows);
  if (model.constant) {
    std::fill(out.begin(), out.end(), *model.constant);
    return out;
  }
  const std::size_t d = X.cols;
  switch (model.kind) {
    case ModelKind::LR: {
      const auto Z = model.standardizer.transform(X);
      for (std::size_t r = 0; r < X.rows; ++r) {
        double s = model.intercept;
        for (std::size_t k = 0; k < d; ++k) s += model.coef[k] * Z[r * d + k];
        out[r] = sigmoid(s);
      }
      break;
    }
    case ModelKind::RF:
      for (std::size_t r = 0; r < X.rows; ++r) {
        double s = 0.0;
        for (const auto& t : model.trees) s += t.predict(X.row(r));
        out[r] = s / static_cast<double>(model.trees.size());
      }
      break;
    case ModelKind::GB:
      for (std::size_t r = 0; r < X.rows; ++r) {
        double s = model.init_score;
        for (const auto& t : model.trees) s += t.predict(X.row(r));
        out[r] = sigmoid(s);
      }
      break;
    case ModelKind::MLP: {
      const auto Z = model.standardizer.transform(X);
      const auto& net = model.net;
      for (std::size_t r = 0; r < X.rows; ++r) {
        const double* z = Z.data() + r * d;
        double s = net.b2;
        for (std::size_t j = 0; j < net.hidden; ++j) {
          double a = net.b1[j];
          for (std::size_t k = 0; k < d; ++k) a += net.w1[j * d + k] * z[k];
          if (a > 0.0) s += net.w2[j] * a;
        }
        out[r] = sigmoid(s);
      }
      break;
    }
  }
  return out;
}

std::vector<std::pair<std::string, double>> rf_variable_importance(const TrainedModel& model) {
  if (model.kind != ModelKind::RF) {
    throw Error(ErrorCode::WrongKind,
                "variable importance is only defined for RF, not " + std::string(to_string(model.kind)));
  }
  std::vector<std::size_t> order(model.manifest.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return model.importances[a] > model.importances[b]; });
  std::vector<std::pair<std::string, double>> ranked;
  for (auto j : order) ranked.emplace_back(model.manifest[j], model.importances[j]);
  return ranked;
}

Hyperparameters parse_hyperparameters(std::string_view json_text, Hyperparameters base) {
  try {
    return from_json(json::parse(json_text), base);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadConfig, std::string("hyperparameters: ") + e.what());
  }
}

std::string hyperparameters_json(const Hyperparameters& params) { return to_json(params).dump(2); }

std::string serialize_model(const TrainedModel& m) {
  json h;
  h["format"] = kFormat;
  h["version"] = kFormatVersion;
  h["kind"] = to_string(m.kind);
  h["seed"] = m.seed;
  h["hyperparameters"] = to_json(m.params);
  h["manifest"] = m.manifest;
  h["fingerprint"] = m.fingerprint;
  h["constant"] = m.constant ? json(*m.constant) : json(nullptr);
  h["standardizer"] = {{"mean", m.standardizer.mean}, {"scale", m.standardizer.scale}};
  h["coef"] = m.coef;
  h["intercept"] = m.intercept;
  h["iterations"] = m.iterations;
  h["init_score"] = m.init_score;
  h["importances"] = m.importances;
  h["deviance"] = m.deviance;
  h["net"] = {{"inputs", m.net.inputs}, {"hidden", m.net.hidden}, {"w1", m.net.w1},
              {"b1", m.net.b1},         {"w2", m.net.w2},         {"b2", m.net.b2}};
  h["epoch_loss"] = m.epoch_loss;
  std::vector<std::size_t> sizes;
  for (const auto& t : m.trees) sizes.push_back(t.nodes.size());
  h["tree_nodes"] = sizes;

  std::string out = h.dump();
  out += '\n';
  for (const auto& t : m.trees) {
    for (const auto& n : t.nodes) {
      append_pod(out, &n.feature, 4);
      append_pod(out, &n.right, 4);
      append_pod(out, &n.value, 8);
    }
  }
  return out;
}

TrainedModel deserialize_model(std::string_view bytes) {
  const auto newline = bytes.find('\n');
  if (newline == std::string_view::npos) throw Error(ErrorCode::WrongKind, "not a model file: no header line");
  TrainedModel m;
  std::vector<std::size_t> sizes;
  try {
    const json h = json::parse(bytes.substr(0, newline));
    if (!h.is_object() || h.value("format", "") != kFormat) {
      throw Error(ErrorCode::WrongKind, "not a model file");
    }
    if (h.at("version").get<int>() != kFormatVersion) {
      throw Error(ErrorCode::WrongKind, "unsupported model file version " + h.at("version").dump());
    }
    m.kind = parse_model_kind(h.at("kind").get<std::string>());
    m.seed = h.at("seed").get<std::uint64_t>();
    m.params = from_json(h.at("hyperparameters"), {});
    m.manifest = h.at("manifest").get<std::vector<std::string>>();
    m.fingerprint = h.at("fingerprint").get<std::uint64_t>();
    if (!h.at("constant").is_null()) m.constant = h.at("constant").get<double>();
    m.standardizer.mean = h.at("standardizer").at("mean").get<std::vector<double>>();
    m.standardizer.scale = h.at("standardizer").at("scale").get<std::vector<double>>();
    m.coef = h.at("coef").get<std::vector<double>>();
    m.intercept = h.at("intercept").get<double>();
    m.iterations = h.at("iterations").get<int>();
    m.init_score = h.at("init_score").get<double>();
    m.importances = h.at("importances").get<std::vector<double>>();
    m.deviance = h.at("deviance").get<std::vector<double>>();
    const auto& net = h.at("net");
    m.net.inputs = net.at("inputs").get<std::size_t>();
    m.net.hidden = net.at("hidden").get<std::size_t>();
    m.net.w1 = net.at("w1").get<std::vector<double>>();
    m.net.b1 = net.at("b1").get<std::vector<double>>();
    m.net.w2 = net.at("w2").get<std::vector<double>>();
    m.net.b2 = net.at("b2").get<double>();
    m.epoch_loss = h.at("epoch_loss").get<std::vector<double>>();
    sizes = h.at("tree_nodes").get<std::vector<std::size_t>>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::WrongKind, std::string("malformed model header: ") + e.what());
  }
  if (manifest_fingerprint(m.manifest) != m.fingerprint) {
    throw Error(ErrorCode::ManifestMismatch, "model header fingerprint does not match its manifest");
  }

  const std::size_t total = std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
  const auto body = bytes.substr(newline + 1);
  if (body.size() != total * kNodeBytes) {
    throw Error(ErrorCode::WrongKind, "model tree block has " + std::to_string(body.size()) + " bytes, expected " +
                                          std::to_string(total * kNodeBytes));
  }
  const char* p = body.data();
  m.trees.resize(sizes.size());
  for (std::size_t t = 0; t < sizes.size(); ++t) {
    auto& nodes = m.trees[t].nodes;
    nodes.resize(sizes[t]);
    for (auto& n : nodes) {
      std::memcpy(&n.feature, p, 4);
      std::memcpy(&n.right, p + 4, 4);
      std::memcpy(&n.value, p + 8, 8);
      p += kNodeBytes;
      const auto limit = static_cast<std::int32_t>(nodes.size());
      if (n.feature >= static_cast<std::int32_t>(m.manifest.size()) || (n.feature >= 0 && (n.right <= 0 || n.right >= limit))) {
        throw Error(ErrorCode::WrongKind, "model tree block holds an invalid node");
      }
    }
  }
  return m;
}

void save_model(const std::filesystem::path& path, const TrainedModel& model) {
  csv::write_text_file(path, serialize_model(model));
}

TrainedModel load_model(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw Error(ErrorCode::MissingFile, "model file not found: " + path.string());
  return deserialize_model(csv::read_text_file(path));
}

}  // namespace edbench::models
