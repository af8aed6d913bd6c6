#include "topicpages/snippetrank.hpp"

#include <algorithm>

#include "topicpages/error.hpp"

namespace topicpages {

double location_tf(std::size_t tf, std::size_t length, std::size_t first_pos) {
  if (tf == 0 || length == 0) return 0.0;
  const double len = static_cast<double>(length);
  return static_cast<double>(tf) / len * (1.0 - static_cast<double>(first_pos) / len);
}

std::size_t token_index_at(const Snippet& snippet, std::size_t char_offset) {
  std::size_t index = 0;
  for (const auto& sentence : snippet.sentences) {
    if (!sentence.tokens.empty() && sentence.tokens.back().span.end <= char_offset) {
      index += sentence.tokens.size();
      continue;
    }
    for (const auto& token : sentence.tokens) {
      if (token.span.end > char_offset) return index;
      ++index;
    }
  }
  return index;
}

SnippetScore score_snippet(std::string_view concept_id, const Snippet& snippet,
                           std::span<const Annotation> annotations) {
  if (snippet.token_count == 0) {
    throw DataError("snippet " + snippet.doc_id + "#" + std::to_string(snippet.index) + " has no tokens");
  }
  SnippetScore s;
  s.ref = {snippet.doc_id, snippet.index};
  s.length = snippet.token_count;
  const Annotation* first = nullptr;
  for (const auto& a : annotations) {
    if (a.concept_id != concept_id || a.doc_id != snippet.doc_id || a.snippet_index != snippet.index) continue;
    ++s.tf;
    if (first == nullptr || a.span.begin < first->span.begin) first = &a;
  }
  s.first_pos = first == nullptr ? s.length : token_index_at(snippet, first->span.begin);
  s.score = location_tf(s.tf, s.length, s.first_pos);
  return s;
}

bool snippet_rank_before(const SnippetScore& a, const SnippetScore& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.first_pos != b.first_pos) return a.first_pos < b.first_pos;
  return a.ref < b.ref;
}

std::vector<SnippetScore> rank_snippets(std::vector<SnippetScore> scored, std::size_t k) {
  std::erase_if(scored, [](const SnippetScore& s) { return !(s.score > 0.0); });
  const auto keep = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep), scored.end(),
                    snippet_rank_before);
  scored.resize(keep);
  return scored;
}

}  // namespace topicpages
