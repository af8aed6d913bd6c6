#include "topicpages/metrics.hpp"

#include <random>
#include <string>

#include "topicpages/error.hpp"

namespace topicpages {

namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

ClassMetrics class_metrics(std::size_t tp, std::size_t fp, std::size_t fn) {
  ClassMetrics m;
  m.precision = ratio(tp, tp + fp);
  m.recall = ratio(tp, tp + fn);
  const double sum = m.precision + m.recall;
  m.f1 = sum == 0.0 ? 0.0 : 2.0 * m.precision * m.recall / sum;
  return m;
}

}  // namespace

EvalMetrics metrics_from_confusion(const Confusion& c) {
  EvalMetrics m;
  m.confusion = c;
  m.good = class_metrics(c.tp, c.fp, c.fn);
  m.bad = class_metrics(c.tn, c.fn, c.fp);
  m.macro_precision = (m.good.precision + m.bad.precision) / 2.0;
  m.macro_recall = (m.good.recall + m.bad.recall) / 2.0;
  m.macro_f1 = (m.good.f1 + m.bad.f1) / 2.0;
  return m;
}

EvalMetrics evaluate(std::span<const Prediction> predictions) {
  if (predictions.empty()) throw DataError("cannot evaluate an empty prediction list");
  Confusion c;
  for (const auto& p : predictions) {
    if (p.gold == Label::good) {
      (p.predicted == Label::good ? c.tp : c.fn) += 1;
    } else {
      (p.predicted == Label::good ? c.fp : c.tn) += 1;
    }
  }
  return metrics_from_confusion(c);
}

std::vector<std::size_t> stratified_folds(std::span<const LabeledExample> dataset, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw DataError("k must be at least 2");
  if (dataset.size() < k) throw DataError("dataset smaller than k");
  std::vector<std::size_t> fold(dataset.size(), 0);
  std::mt19937_64 rng(seed);
  for (const auto label : {Label::good, Label::bad}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      if (dataset[i].label == label) members.push_back(i);
    }
    for (std::size_t i = members.size(); i-- > 1;) {
      const auto j = static_cast<std::size_t>(rng() % (i + 1));
      std::swap(members[i], members[j]);
    }
    for (std::size_t n = 0; n < members.size(); ++n) fold[members[n]] = n % k;
  }
  return fold;
}

EvalMetrics kfold_cv(std::span<const LabeledExample> dataset, std::size_t k, const Trainer& trainer,
                     std::uint64_t seed, std::vector<EvalMetrics>* per_fold) {
  const auto fold = stratified_folds(dataset, k, seed);
  std::vector<std::vector<std::size_t>> members(k);
  for (std::size_t i = 0; i < fold.size(); ++i) members[fold[i]].push_back(i);
  for (std::size_t f = 0; f < k; ++f) {
    bool good = false;
    bool bad = false;
    for (const auto i : members[f]) (dataset[i].label == Label::good ? good : bad) = true;
    if (!good || !bad) throw DataError("fold " + std::to_string(f) + " holds a single class; dataset too small for k");
  }

  EvalMetrics mean;
  for (std::size_t f = 0; f < k; ++f) {
    std::vector<LabeledExample> train;
    train.reserve(dataset.size() - members[f].size());
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      if (fold[i] != f) train.push_back(dataset[i]);
    }
    const auto classify = trainer(train);
    std::vector<Prediction> predictions;
    predictions.reserve(members[f].size());
    for (const auto i : members[f]) predictions.push_back({classify(dataset[i]), dataset[i].label});
    const auto m = evaluate(predictions);
    if (per_fold != nullptr) per_fold->push_back(m);

    for (auto [dst, src] : {std::pair{&mean.good, &m.good}, std::pair{&mean.bad, &m.bad}}) {
      dst->precision += src->precision;
      dst->recall += src->recall;
      dst->f1 += src->f1;
    }
    mean.macro_precision += m.macro_precision;
    mean.macro_recall += m.macro_recall;
    mean.macro_f1 += m.macro_f1;
    mean.confusion.tp += m.confusion.tp;
    mean.confusion.fp += m.confusion.fp;
    mean.confusion.fn += m.confusion.fn;
    mean.confusion.tn += m.confusion.tn;
  }
  const auto n = static_cast<double>(k);
  for (auto* c : {&mean.good, &mean.bad}) {
    c->precision /= n;
    c->recall /= n;
    c->f1 /= n;
  }
  mean.macro_precision /= n;
  mean.macro_recall /= n;
  mean.macro_f1 /= n;
  return mean;
}

}  // namespace topicpages
