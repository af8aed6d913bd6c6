#include "topicpages/related.hpp"

#include <algorithm>

namespace topicpages {

SnippetConcepts group_by_snippet(std::span<const Annotation> annotations) {
  SnippetConcepts out;
  for (const auto& a : annotations) out[SnippetRef{a.doc_id, a.snippet_index}].insert(a.concept_id);
  return out;
}

CooccurrenceTable cooccurrence_counts(std::string_view concept_id, const SnippetConcepts& snippets) {
  CooccurrenceTable table;
  table.concept_id = std::string(concept_id);
  for (const auto& [ref, concepts] : snippets) {
    if (concepts.count(table.concept_id) == 0) continue;
    for (const auto& other : concepts) {
      if (other != table.concept_id) ++table.counts[other];
    }
  }
  return table;
}

std::vector<RelatedConcept> top_related(const CooccurrenceTable& table, std::size_t k) {
  std::vector<RelatedConcept> out;
  out.reserve(table.counts.size());
  for (const auto& [id, count] : table.counts) {
    if (id != table.concept_id && count > 0) out.push_back({id, count});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const RelatedConcept& a, const RelatedConcept& b) { return a.count > b.count; });
  if (out.size() > k) out.resize(k);
  return out;
}

}  // namespace topicpages
