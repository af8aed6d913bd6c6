#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "topicpages/annotator.hpp"
#include "topicpages/corpus.hpp"

namespace topicpages {

struct SnippetRef {
  std::string doc_id;
  std::size_t snippet_index = 0;

  friend auto operator<=>(const SnippetRef&, const SnippetRef&) = default;
};

struct SnippetScore {
  SnippetRef ref;
  std::size_t tf = 0;
  std::size_t length = 0;     // |s|, tokens in the snippet
  std::size_t first_pos = 0;  // l1, 0-based token index; equals length when tf = 0
  double score = 0.0;

  friend bool operator==(const SnippetScore&, const SnippetScore&) = default;
};

/// F = tf/|s| * (1 - l1/|s|).
double location_tf(std::size_t tf, std::size_t length, std::size_t first_pos);

/// Snippet-level index of the token starting at or covering `char_offset`.
std::size_t token_index_at(const Snippet& snippet, std::size_t char_offset);

/// Counts annotations of `concept_id` that belong to this snippet; others are
/// ignored. Throws DataError for a snippet with no tokens.
SnippetScore score_snippet(std::string_view concept_id, const Snippet& snippet,
                           std::span<const Annotation> annotations);

/// Composite order: score desc, first_pos asc, doc_id asc, snippet_index asc.
bool snippet_rank_before(const SnippetScore& a, const SnippetScore& b);

inline constexpr std::size_t kDefaultSnippetsK = 10;

/// Top k by the composite order; zero scores dropped.
std::vector<SnippetScore> rank_snippets(std::vector<SnippetScore> scored, std::size_t k = kDefaultSnippetsK);

}  // namespace topicpages
