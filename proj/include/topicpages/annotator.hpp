#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "topicpages/corpus.hpp"
#include "topicpages/phrase_matcher.hpp"
#include "topicpages/taxonomy.hpp"

namespace topicpages {

struct Annotation {
  std::string concept_id;
  std::string doc_id;
  std::size_t snippet_index = 0;
  std::size_t sentence_index = 0;
  Span span;  // within the snippet text
  std::string surface;
  bool via_abbreviation = false;

  friend bool operator==(const Annotation&, const Annotation&) = default;
};

struct AbbreviationPair {
  std::string short_form;
  std::string long_form;
  Span definition_span;  // the parenthesized site, parentheses included
  Span short_span;       // where the short form itself occurs
  Span long_span;

  friend bool operator==(const AbbreviationPair&, const AbbreviationPair&) = default;
};

/// Schwartz-Hearst short/long form detection over one sentence. Spans are
/// shifted by `offset`.
std::vector<AbbreviationPair> detect_abbreviations(std::string_view sentence, std::size_t offset = 0);

/// Runs detection sentence by sentence; spans are in snippet coordinates.
std::vector<AbbreviationPair> detect_abbreviations(const Snippet& snippet);

/// A short form that a document defines for a taxonomy concept.
struct LocalAlias {
  std::string short_form;
  std::size_t concept_index;
  std::size_t snippet_index;
  AbbreviationPair pair;
};

/// Dictionary annotator. Holds the compiled automaton for one taxonomy;
/// `annotate` is const and may run concurrently on different documents.
class Annotator {
 public:
  explicit Annotator(const Taxonomy& taxonomy);

  std::vector<Annotation> annotate(const Document& doc) const;

  /// Abbreviations in `doc` whose long form is a taxonomy alias.
  std::vector<LocalAlias> local_aliases(const Document& doc) const;

  const Taxonomy& taxonomy() const noexcept { return *taxonomy_; }

 private:
  const Taxonomy* taxonomy_;
  PhraseMatcher matcher_;
};

std::vector<Annotation> annotate_document(const Document& doc, const Taxonomy& taxonomy);

/// Picks one concept for a span claimed by several: the concept whose
/// preferred label normalizes to the surface, else the lowest concept_id.
std::size_t resolve_same_span(const Taxonomy& taxonomy, std::string_view surface,
                              const std::vector<std::size_t>& concept_indices);

}  // namespace topicpages
