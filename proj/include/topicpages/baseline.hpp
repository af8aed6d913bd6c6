#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "topicpages/dataset.hpp"
#include "topicpages/features.hpp"
#include "topicpages/metrics.hpp"

namespace topicpages {

/// Logistic regression over the definitional-cue feature space.
struct BaselineModel {
  Eigen::VectorXd weights = Eigen::VectorXd::Zero(features::kCount);
  double bias = 0.0;
  std::string feature_version{features::kVersion};

  double score(const FeatureVector& x) const;
  double score(std::string_view term, std::string_view sentence, const Tagger& tagger = default_tagger()) const;
};

struct TrainOptions {
  int epochs = 1000;
  double learning_rate = 0.5;
  bool standardize = true;
};

/// Design matrix (one row per example) and 0/1 targets.
struct TrainingSet {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
};

TrainingSet build_training_set(const std::vector<LabeledExample>& examples, const Tagger& tagger = default_tagger());

/// Mean cross-entropy of a logistic model with parameters theta = [w; b].
double cross_entropy(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& theta);
Eigen::VectorXd cross_entropy_gradient(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                       const Eigen::VectorXd& theta);

/// Full-batch gradient descent from all-zero parameters. With `standardize`
/// the descent runs on z-scored columns and the result is mapped back to raw
/// feature units. `loss_history`, if given, receives the loss before each epoch
/// and after the last one (in the space the descent runs in).
BaselineModel train_baseline(const TrainingSet& data, const TrainOptions& options = {},
                             std::vector<double>* loss_history = nullptr);
BaselineModel train_baseline(const std::vector<LabeledExample>& train, const TrainOptions& options = {},
                             std::vector<double>* loss_history = nullptr);

/// Examples whose term can be located in the sentence; `dropped` counts
/// the rest.
std::vector<LabeledExample> featurizable_examples(const std::vector<LabeledExample>& examples,
                                                  std::size_t* dropped = nullptr);

/// Trainer for kfold_cv: fits a baseline and predicts good at score >= threshold.
Trainer baseline_trainer(TrainOptions options = {}, double threshold = 0.5);

void save_model(const BaselineModel& model, const std::filesystem::path& path);
/// Rejects files whose feature version or weight length does not match.
BaselineModel load_model(const std::filesystem::path& path);
std::string model_to_json(const BaselineModel& model);
BaselineModel model_from_json(std::string_view text);

}  // namespace topicpages
