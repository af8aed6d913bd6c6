#include "topicpages/baseline.hpp"

#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

#include <nlohmann/json.hpp>

#include "topicpages/error.hpp"

namespace topicpages {

namespace {

Eigen::VectorXd sigmoid(const Eigen::VectorXd& z) {
  return z.unaryExpr([](double v) {
    if (v >= 0) return 1.0 / (1.0 + std::exp(-v));
    const double e = std::exp(v);
    return e / (1.0 + e);
  });
}

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

}  // namespace

double BaselineModel::score(const FeatureVector& x) const {
  const double z = weights.dot(x) + bias;
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double BaselineModel::score(std::string_view term, std::string_view sentence, const Tagger& tagger) const {
  return score(featurize(term, sentence, tagger));
}

TrainingSet build_training_set(const std::vector<LabeledExample>& examples, const Tagger& tagger) {
  TrainingSet set;
  set.X.resize(static_cast<Eigen::Index>(examples.size()), static_cast<Eigen::Index>(features::kCount));
  set.y.resize(static_cast<Eigen::Index>(examples.size()));
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    set.X.row(row) = featurize(examples[i].term, examples[i].sentence, tagger).transpose();
    set.y[row] = examples[i].label == Label::good ? 1.0 : 0.0;
  }
  return set;
}

double cross_entropy(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& theta) {
  const auto d = X.cols();
  const Eigen::VectorXd z = (X * theta.head(d)).array() + theta[d];
  double total = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) total += softplus(z[i]) - y[i] * z[i];
  return total / static_cast<double>(z.size());
}

Eigen::VectorXd cross_entropy_gradient(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                       const Eigen::VectorXd& theta) {
  const auto d = X.cols();
  const auto n = static_cast<double>(X.rows());
  const Eigen::VectorXd z = (X * theta.head(d)).array() + theta[d];
  const Eigen::VectorXd r = sigmoid(z) - y;
  Eigen::VectorXd g(d + 1);
  g.head(d) = X.transpose() * r / n;
  g[d] = r.sum() / n;
  return g;
}

BaselineModel train_baseline(const TrainingSet& data, const TrainOptions& options, std::vector<double>* loss_history) {
  if (data.X.rows() == 0) throw DataError("cannot train on an empty set");
  if (data.X.cols() != static_cast<Eigen::Index>(features::kCount)) throw DataError("feature width mismatch");
  const double positives = data.y.sum();
  if (positives == 0 || positives == static_cast<double>(data.y.size())) {
    throw DataError("training set needs at least one example of each class");
  }
  if (options.epochs < 0 || !(options.learning_rate > 0)) throw UsageError("epochs >= 0 and learning rate > 0 required");

  const auto d = data.X.cols();
  Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(d);
  Eigen::RowVectorXd scale = Eigen::RowVectorXd::Ones(d);
  if (options.standardize) {
    mean = data.X.colwise().mean();
    const Eigen::MatrixXd centered = data.X.rowwise() - mean;
    const Eigen::RowVectorXd sd = (centered.colwise().squaredNorm() / static_cast<double>(data.X.rows())).cwiseSqrt();
    for (Eigen::Index j = 0; j < d; ++j) scale[j] = sd[j] > 1e-12 ? sd[j] : 1.0;
  }
  const Eigen::MatrixXd Z = ((data.X.rowwise() - mean).array().rowwise() / scale.array()).matrix();

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(d + 1);
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    if (loss_history != nullptr) loss_history->push_back(cross_entropy(Z, data.y, theta));
    theta -= options.learning_rate * cross_entropy_gradient(Z, data.y, theta);
  }
  if (loss_history != nullptr) loss_history->push_back(cross_entropy(Z, data.y, theta));

  BaselineModel model;
  model.weights = theta.head(d).array() / scale.transpose().array();
  model.bias = theta[d] - mean.dot(model.weights);
  return model;
}

BaselineModel train_baseline(const std::vector<LabeledExample>& train, const TrainOptions& options,
                             std::vector<double>* loss_history) {
  return train_baseline(build_training_set(train), options, loss_history);
}

std::vector<LabeledExample> featurizable_examples(const std::vector<LabeledExample>& examples, std::size_t* dropped) {
  std::vector<LabeledExample> out;
  std::size_t lost = 0;
  for (const auto& ex : examples) {
    const auto tokens = tokenize(ex.sentence);
    if (find_mention(ex.term, tokens)) {
      out.push_back(ex);
    } else {
      ++lost;
    }
  }
  if (dropped != nullptr) *dropped = lost;
  return out;
}

Trainer baseline_trainer(TrainOptions options, double threshold) {
  return [options, threshold](const std::vector<LabeledExample>& train) -> Classifier {
    auto model = std::make_shared<BaselineModel>(train_baseline(train, options));
    return [model, threshold](const LabeledExample& ex) {
      return model->score(ex.term, ex.sentence) >= threshold ? Label::good : Label::bad;
    };
  };
}

std::string model_to_json(const BaselineModel& model) {
  nlohmann::ordered_json j;
  j["feature_version"] = model.feature_version;
  j["bias"] = model.bias;
  auto& w = j["weights"] = nlohmann::ordered_json::object();
  const auto names = features::names();
  for (std::size_t i = 0; i < features::kCount; ++i) w[std::string(names[i])] = model.weights[static_cast<Eigen::Index>(i)];
  return j.dump(2) + "\n";
}

BaselineModel model_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("model file: ") + e.what());
  }
  if (!j.is_object() || !j.contains("feature_version") || !j.contains("bias") || !j.contains("weights")) {
    throw DataError("model file: expected feature_version, bias and weights");
  }
  BaselineModel model;
  model.feature_version = j["feature_version"].get<std::string>();
  if (model.feature_version != features::kVersion) {
    throw DataError("model file: feature version '" + model.feature_version + "' does not match '" +
                    std::string(features::kVersion) + "'");
  }
  model.bias = j["bias"].get<double>();
  const auto& w = j["weights"];
  if (!w.is_object() || w.size() != features::kCount) throw DataError("model file: weight count mismatch");
  const auto names = features::names();
  for (std::size_t i = 0; i < features::kCount; ++i) {
    const std::string key(names[i]);
    if (!w.contains(key)) throw DataError("model file: missing weight '" + key + "'");
    model.weights[static_cast<Eigen::Index>(i)] = w[key].get<double>();
  }
  return model;
}

void save_model(const BaselineModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << model_to_json(model);
}

BaselineModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return model_from_json(ss.str());
}

}  // namespace topicpages
