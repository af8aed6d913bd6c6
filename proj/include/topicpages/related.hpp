#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "topicpages/annotator.hpp"
#include "topicpages/snippetrank.hpp"

namespace topicpages {

/// Concepts annotated in each snippet.
using SnippetConcepts = std::map<SnippetRef, std::set<std::string>>;

SnippetConcepts group_by_snippet(std::span<const Annotation> annotations);

struct CooccurrenceTable {
  std::string concept_id;
  std::map<std::string, std::size_t> counts;  // other concept -> snippets holding both
};

CooccurrenceTable cooccurrence_counts(std::string_view concept_id, const SnippetConcepts& snippets);

struct RelatedConcept {
  std::string concept_id;
  std::size_t count = 0;

  friend bool operator==(const RelatedConcept&, const RelatedConcept&) = default;
};

inline constexpr std::size_t kDefaultRelatedK = 5;

/// Count desc, then concept_id asc; at most k.
std::vector<RelatedConcept> top_related(const CooccurrenceTable& table, std::size_t k = kDefaultRelatedK);

}  // namespace topicpages
