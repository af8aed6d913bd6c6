#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "topicpages/dataset.hpp"

namespace topicpages {

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Counts with "good" as the positive class.
struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t total() const noexcept { return tp + fp + fn + tn; }
};

struct EvalMetrics {
  ClassMetrics good;
  ClassMetrics bad;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  Confusion confusion;
};

struct Prediction {
  Label predicted;
  Label gold;
};

/// P or R is 0 when its denominator is 0; F1 is 0 when P + R is 0.
EvalMetrics metrics_from_confusion(const Confusion& c);
/// Throws DataError on an empty list.
EvalMetrics evaluate(std::span<const Prediction> predictions);

inline constexpr std::uint64_t kDefaultFoldSeed = 42;

/// Fold id per example. Each class is shuffled on its own (Fisher-Yates with
/// mt19937_64, j = rng() % (i + 1), i descending) and dealt round-robin, so
/// the n-th shuffled example of a class lands in fold n mod k.
std::vector<std::size_t> stratified_folds(std::span<const LabeledExample> dataset, std::size_t k,
                                          std::uint64_t seed = kDefaultFoldSeed);

using Classifier = std::function<Label(const LabeledExample&)>;
using Trainer = std::function<Classifier(const std::vector<LabeledExample>& train)>;

/// Stratified k-fold CV. Per-class and macro values are unweighted means of
/// the per-fold values; the confusion is summed. Throws DataError when k < 2,
/// the dataset is smaller than k, or some fold lacks a class.
EvalMetrics kfold_cv(std::span<const LabeledExample> dataset, std::size_t k, const Trainer& trainer,
                     std::uint64_t seed = kDefaultFoldSeed, std::vector<EvalMetrics>* per_fold = nullptr);

}  // namespace topicpages
