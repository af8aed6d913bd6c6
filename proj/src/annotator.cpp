#include "topicpages/annotator.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

namespace topicpages {

namespace {

std::vector<std::string> normalized_tokens(std::string_view text) {
  std::vector<std::string> out;
  for (const auto& t : tokenize(text)) out.push_back(normalize(t.text));
  return out;
}

std::vector<std::string> normalized_tokens(const Sentence& s) {
  std::vector<std::string> out;
  out.reserve(s.tokens.size());
  for (const auto& t : s.tokens) out.push_back(normalize(t.text));
  return out;
}

struct SpanClaim {
  std::size_t sentence_index = 0;
  std::set<std::size_t> global;
  std::set<std::size_t> local;
};

using SnippetClaims = std::map<Span, SpanClaim>;

}  // namespace

std::size_t resolve_same_span(const Taxonomy& taxonomy, std::string_view surface,
                              const std::vector<std::size_t>& concept_indices) {
  const auto& concepts = taxonomy.concepts();
  const auto key = normalize(surface);
  std::optional<std::size_t> preferred;
  std::optional<std::size_t> lowest;
  for (const auto ci : concept_indices) {
    const auto& id = concepts[ci].concept_id;
    if (!lowest || id < concepts[*lowest].concept_id) lowest = ci;
    if (normalize(concepts[ci].preferred_label) == key &&
        (!preferred || id < concepts[*preferred].concept_id)) {
      preferred = ci;
    }
  }
  return preferred ? *preferred : *lowest;
}

Annotator::Annotator(const Taxonomy& taxonomy) : taxonomy_(&taxonomy) {
  for (const auto& [key, entries] : taxonomy.surface_index()) {
    const auto tokens = normalized_tokens(key);
    if (!tokens.empty()) matcher_.add(tokens);
  }
  matcher_.build();
}

std::vector<LocalAlias> Annotator::local_aliases(const Document& doc) const {
  std::vector<LocalAlias> out;
  for (const auto& snippet : doc.snippets) {
    for (auto& pair : detect_abbreviations(snippet)) {
      const auto concepts = taxonomy_->match_surface(pair.long_form);
      if (concepts.empty()) continue;
      const auto chosen = resolve_same_span(*taxonomy_, pair.long_form, concepts);
      out.push_back({pair.short_form, chosen, snippet.index, std::move(pair)});
    }
  }
  return out;
}

std::vector<Annotation> Annotator::annotate(const Document& doc) const {
  const auto& concepts = taxonomy_->concepts();
  const auto locals = local_aliases(doc);

  // Document-scoped automaton over the injected short forms.
  PhraseMatcher local_matcher;
  std::map<std::string, std::set<std::size_t>> local_concepts;
  for (const auto& alias : locals) {
    local_concepts[alias.short_form].insert(alias.concept_index);
    const auto tokens = normalized_tokens(alias.short_form);
    if (!tokens.empty()) local_matcher.add(tokens);
  }
  local_matcher.build();

  std::set<std::pair<std::size_t, Span>> definition_sites;
  for (const auto& alias : locals) definition_sites.emplace(alias.snippet_index, alias.pair.short_span);

  std::vector<Annotation> out;
  for (const auto& snippet : doc.snippets) {
    const std::string_view text = snippet.text;
    SnippetClaims claims;
    for (std::size_t si = 0; si < snippet.sentences.size(); ++si) {
      const auto& sentence = snippet.sentences[si];
      const auto tokens = normalized_tokens(sentence);
      auto span_of = [&](const PhraseMatcher::Match& m) {
        return Span{sentence.tokens[m.first_token].span.begin, sentence.tokens[m.end_token - 1].span.end};
      };
      for (const auto& m : matcher_.find_all(tokens)) {
        const auto span = span_of(m);
        if (definition_sites.count({snippet.index, span}) != 0) continue;
        const auto matched = taxonomy_->match_surface(text.substr(span.begin, span.size()));
        if (matched.empty()) continue;
        auto& claim = claims[span];
        claim.sentence_index = si;
        claim.global.insert(matched.begin(), matched.end());
      }
      if (local_concepts.empty()) continue;
      for (const auto& m : local_matcher.find_all(tokens)) {
        const auto span = span_of(m);
        if (definition_sites.count({snippet.index, span}) != 0) continue;
        const auto it = local_concepts.find(std::string(text.substr(span.begin, span.size())));
        if (it == local_concepts.end()) continue;
        auto& claim = claims[span];
        claim.sentence_index = si;
        claim.local.insert(it->second.begin(), it->second.end());
      }
    }

    // Longest span first, earlier start on ties; keep what does not overlap.
    std::vector<std::pair<Span, const SpanClaim*>> ordered;
    ordered.reserve(claims.size());
    for (const auto& [span, claim] : claims) ordered.emplace_back(span, &claim);
    std::stable_sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
      if (a.first.size() != b.first.size()) return a.first.size() > b.first.size();
      return a.first.begin < b.first.begin;
    });
    std::map<std::size_t, std::size_t> accepted;  // begin -> end
    std::vector<Annotation> snippet_annotations;
    for (const auto& [span, claim] : ordered) {
      auto next = accepted.lower_bound(span.begin);
      if (next != accepted.end() && next->first < span.end) continue;
      if (next != accepted.begin() && std::prev(next)->second > span.begin) continue;
      accepted.emplace(span.begin, span.end);

      std::vector<std::size_t> candidates(claim->global.begin(), claim->global.end());
      candidates.insert(candidates.end(), claim->local.begin(), claim->local.end());
      const auto surface = std::string(text.substr(span.begin, span.size()));
      const auto chosen = resolve_same_span(*taxonomy_, surface, candidates);

      Annotation a;
      a.concept_id = concepts[chosen].concept_id;
      a.doc_id = doc.doc_id;
      a.snippet_index = snippet.index;
      a.sentence_index = claim->sentence_index;
      a.span = span;
      a.surface = surface;
      a.via_abbreviation = claim->global.count(chosen) == 0;
      snippet_annotations.push_back(std::move(a));
    }
    std::sort(snippet_annotations.begin(), snippet_annotations.end(),
              [](const Annotation& a, const Annotation& b) { return a.span.begin < b.span.begin; });
    out.insert(out.end(), std::make_move_iterator(snippet_annotations.begin()),
               std::make_move_iterator(snippet_annotations.end()));
  }
  return out;
}

std::vector<Annotation> annotate_document(const Document& doc, const Taxonomy& taxonomy) {
  return Annotator(taxonomy).annotate(doc);
}

}  // namespace topicpages
