#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

#include <Eigen/Dense>

#include "topicpages/corpus.hpp"

namespace topicpages {

/// Definitional-cue feature space. Changing the inventory requires a new
/// version tag so stored models are rejected instead of misread.
namespace features {

inline constexpr std::string_view kVersion = "defcue-v1";

enum Index : std::size_t {
  cue_is_a,           // "is a(n)" / "are a(n)"
  cue_is_defined_as,  // "is/are defined as"
  cue_refers_to,      // "refers/refer to"
  cue_means,          // "means"
  cue_is_the,         // "is/are the"
  cue_denotes,        // "denotes"
  cue_is_called,      // "is/are called"
  concept_at_start,   // first term token opens the sentence, determiners aside
  relative_position,  // first term token index / token count
  length_le_10,
  length_le_20,
  length_le_40,
  length_gt_40,
  copula_present,
  det_noun_count,
  verb_det_count,
  noun_prep_count,
  pronoun_subject,  // sentence opens with a pronoun
  kFeatureCount
};

inline constexpr std::size_t kCount = Index::kFeatureCount;

/// Cue phrases may start this many tokens after the end of the mention.
inline constexpr std::size_t kCueWindow = 4;

std::array<std::string_view, kCount> names();

}  // namespace features

using FeatureVector = Eigen::Matrix<double, static_cast<int>(features::kCount), 1>;

/// Throws DataError if the concept does not occur in the sentence.
FeatureVector featurize(std::string_view term, const TaggedTokens& sentence);
FeatureVector featurize(std::string_view term, std::string_view sentence, const Tagger& tagger = default_tagger());

/// Token index of the first occurrence of the concept, if any.
std::optional<std::size_t> find_mention(std::string_view term, std::span<const Token> tokens,
                                        std::size_t* mention_length = nullptr);

}  // namespace topicpages
