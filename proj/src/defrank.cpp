#include "topicpages/defrank.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "topicpages/error.hpp"

namespace topicpages {

std::vector<DefinitionCandidate> extract_candidates(std::string_view concept_id,
                                                    std::span<const Annotation> annotations, const Corpus& corpus,
                                                    std::string_view domain, const Taxonomy& taxonomy) {
  if (taxonomy.find(concept_id) == nullptr) throw DataError("unknown concept '" + std::string(concept_id) + "'");

  // First annotation (by span) of the concept per sentence.
  std::map<Provenance, const Annotation*> hits;
  for (const auto& a : annotations) {
    if (a.concept_id != concept_id) continue;
    const Document* doc = corpus.find(a.doc_id);
    if (doc == nullptr || doc->domain != domain) continue;
    auto [it, inserted] = hits.try_emplace(Provenance{a.doc_id, a.snippet_index, a.sentence_index}, &a);
    if (!inserted && a.span < it->second->span) it->second = &a;
  }

  std::vector<DefinitionCandidate> out;
  std::set<std::string> seen;
  for (const auto& [prov, annotation] : hits) {
    const Snippet* snippet = corpus.find_snippet(prov.doc_id, prov.snippet_index);
    if (snippet == nullptr || prov.sentence_index >= snippet->sentences.size()) {
      throw DataError("annotation refers to a missing sentence in '" + prov.doc_id + "'");
    }
    const auto span = snippet->sentences[prov.sentence_index].span;
    std::string text = snippet->text.substr(span.begin, span.size());
    if (!seen.insert(normalize(text)).second) continue;
    out.push_back({std::string(concept_id), annotation->surface, std::move(text), prov, std::string(domain)});
  }
  return out;
}

BaselineScorer::BaselineScorer(BaselineModel model, const Tagger& tagger) : model_(std::move(model)), tagger_(&tagger) {}

double BaselineScorer::score(std::string_view term, std::string_view sentence) const {
  return model_.score(term, sentence, *tagger_);
}

std::vector<double> BaselineScorer::score_batch(std::span<const ScoreQuery> queries) {
  std::vector<double> out;
  out.reserve(queries.size());
  for (const auto& q : queries) out.push_back(score(q.term, q.sentence));
  return out;
}

std::vector<ScoredCandidate> score_candidates(std::span<const DefinitionCandidate> candidates,
                                              DefinitionScorer& scorer) {
  std::vector<ScoreQuery> queries;
  queries.reserve(candidates.size());
  for (const auto& c : candidates) queries.push_back({c.term, c.sentence});
  const auto scores = scorer.score_batch(queries);
  if (scores.size() != candidates.size()) throw ProtocolError("scorer returned the wrong number of scores");
  std::vector<ScoredCandidate> out;
  out.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) out.push_back({candidates[i], scores[i]});
  return out;
}

std::optional<ScoredCandidate> select_definition(std::span<const ScoredCandidate> scored, double threshold) {
  const ScoredCandidate* best = nullptr;
  for (const auto& s : scored) {
    if (best == nullptr || s.score > best->score ||
        (s.score == best->score && s.candidate.provenance < best->candidate.provenance)) {
      best = &s;
    }
  }
  if (best == nullptr || best->score < threshold) return std::nullopt;
  return *best;
}

}  // namespace topicpages
