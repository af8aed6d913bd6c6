#pragma once

#include <compare>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "topicpages/annotator.hpp"
#include "topicpages/baseline.hpp"
#include "topicpages/corpus.hpp"
#include "topicpages/taxonomy.hpp"

namespace topicpages {

struct Provenance {
  std::string doc_id;
  std::size_t snippet_index = 0;
  std::size_t sentence_index = 0;

  friend auto operator<=>(const Provenance&, const Provenance&) = default;
};

struct DefinitionCandidate {
  std::string concept_id;
  std::string term;  // surface of the concept's first annotation in the sentence
  std::string sentence;
  Provenance provenance;
  std::string domain;

  friend bool operator==(const DefinitionCandidate&, const DefinitionCandidate&) = default;
};

struct ScoredCandidate {
  DefinitionCandidate candidate;
  double score = 0.0;

  friend bool operator==(const ScoredCandidate&, const ScoredCandidate&) = default;
};

/// Sentences of `domain` documents that hold an annotation of the concept,
/// deduplicated by normalized text (first provenance kept), ordered by
/// (doc_id, snippet, sentence). Throws DataError for an unknown concept.
std::vector<DefinitionCandidate> extract_candidates(std::string_view concept_id,
                                                    std::span<const Annotation> annotations, const Corpus& corpus,
                                                    std::string_view domain, const Taxonomy& taxonomy);

struct ScoreQuery {
  std::string term;
  std::string sentence;
};

/// Anything that can score (term, sentence) pairs in [0, 1].
class DefinitionScorer {
 public:
  virtual ~DefinitionScorer() = default;
  virtual std::string name() const = 0;
  virtual std::vector<double> score_batch(std::span<const ScoreQuery> queries) = 0;
};

class BaselineScorer final : public DefinitionScorer {
 public:
  explicit BaselineScorer(BaselineModel model, const Tagger& tagger = default_tagger());

  std::string name() const override { return "baseline"; }
  std::vector<double> score_batch(std::span<const ScoreQuery> queries) override;
  double score(std::string_view term, std::string_view sentence) const;
  const BaselineModel& model() const noexcept { return model_; }

 private:
  BaselineModel model_;
  const Tagger* tagger_;
};

std::vector<ScoredCandidate> score_candidates(std::span<const DefinitionCandidate> candidates,
                                              DefinitionScorer& scorer);

inline constexpr double kDefaultDefinitionThreshold = 0.5;

/// Highest score wins, ties go to the earlier provenance. Nothing when the
/// list is empty or the best score is below `threshold`.
std::optional<ScoredCandidate> select_definition(std::span<const ScoredCandidate> scored,
                                                 double threshold = kDefaultDefinitionThreshold);

}  // namespace topicpages
