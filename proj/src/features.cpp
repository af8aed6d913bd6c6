#include "topicpages/features.hpp"

#include <initializer_list>
#include <string>
#include <vector>

#include "topicpages/error.hpp"
#include "topicpages/taxonomy.hpp"

namespace topicpages {

namespace features {

std::array<std::string_view, kCount> names() {
  return {"cue_is_a",       "cue_is_defined_as", "cue_refers_to",   "cue_means",      "cue_is_the",
          "cue_denotes",    "cue_is_called",     "concept_at_start", "relative_position", "length_le_10",
          "length_le_20",   "length_le_40",      "length_gt_40",    "copula_present", "det_noun_count",
          "verb_det_count", "noun_prep_count",   "pronoun_subject"};
}

}  // namespace features

namespace {

bool any_of(const std::string& w, std::initializer_list<std::string_view> options) {
  for (const auto o : options) {
    if (w == o) return true;
  }
  return false;
}

// Does the phrase (alternatives per position) start at token `at`?
bool phrase_at(const std::vector<std::string>& words, std::size_t at,
               std::initializer_list<std::initializer_list<std::string_view>> phrase) {
  if (at + phrase.size() > words.size()) return false;
  std::size_t i = at;
  for (const auto& alternatives : phrase) {
    if (!any_of(words[i], alternatives)) return false;
    ++i;
  }
  return true;
}

}  // namespace

std::optional<std::size_t> find_mention(std::string_view term, std::span<const Token> tokens,
                                        std::size_t* mention_length) {
  std::vector<std::string> needle;
  for (const auto& t : tokenize(term)) needle.push_back(normalize(t.text));
  if (needle.empty() || needle.size() > tokens.size()) return std::nullopt;
  for (std::size_t i = 0; i + needle.size() <= tokens.size(); ++i) {
    bool hit = true;
    for (std::size_t k = 0; k < needle.size() && hit; ++k) hit = normalize(tokens[i + k].text) == needle[k];
    if (hit) {
      if (mention_length != nullptr) *mention_length = needle.size();
      return i;
    }
  }
  return std::nullopt;
}

FeatureVector featurize(std::string_view term, const TaggedTokens& sentence) {
  using namespace features;
  const auto& tokens = sentence.tokens;
  const auto& tags = sentence.tags;
  std::size_t mention_len = 0;
  const auto first = find_mention(term, tokens, &mention_len);
  if (!first) throw DataError("concept '" + std::string(term) + "' does not occur in sentence");

  std::vector<std::string> words;
  words.reserve(tokens.size());
  for (const auto& t : tokens) words.push_back(normalize(t.text));

  FeatureVector x = FeatureVector::Zero();
  const auto after = *first + mention_len;
  for (std::size_t at = after; at < after + kCueWindow && at < words.size(); ++at) {
    if (phrase_at(words, at, {{"is", "are"}, {"a", "an"}})) x[cue_is_a] = 1;
    if (phrase_at(words, at, {{"is", "are"}, {"defined"}, {"as"}})) x[cue_is_defined_as] = 1;
    if (phrase_at(words, at, {{"refers", "refer"}, {"to"}})) x[cue_refers_to] = 1;
    if (phrase_at(words, at, {{"means"}})) x[cue_means] = 1;
    if (phrase_at(words, at, {{"is", "are"}, {"the"}})) x[cue_is_the] = 1;
    if (phrase_at(words, at, {{"denotes"}})) x[cue_denotes] = 1;
    if (phrase_at(words, at, {{"is", "are"}, {"called"}})) x[cue_is_called] = 1;
  }

  bool only_determiners = true;
  for (std::size_t i = 0; i < *first; ++i) only_determiners = only_determiners && tags[i] == PosTag::det;
  x[concept_at_start] = only_determiners ? 1.0 : 0.0;
  x[relative_position] = static_cast<double>(*first) / static_cast<double>(tokens.size());

  std::size_t word_count = 0;
  for (const auto t : tags) word_count += t != PosTag::punct ? 1 : 0;
  if (word_count <= 10) {
    x[length_le_10] = 1;
  } else if (word_count <= 20) {
    x[length_le_20] = 1;
  } else if (word_count <= 40) {
    x[length_le_40] = 1;
  } else {
    x[length_gt_40] = 1;
  }

  for (const auto& w : words) {
    if (any_of(w, {"is", "are", "was", "were", "be", "been", "being"})) x[copula_present] = 1;
  }
  for (std::size_t i = 0; i + 1 < tags.size(); ++i) {
    if (tags[i] == PosTag::det && tags[i + 1] == PosTag::noun) x[det_noun_count] += 1;
    if (tags[i] == PosTag::verb && tags[i + 1] == PosTag::det) x[verb_det_count] += 1;
    if (tags[i] == PosTag::noun && tags[i + 1] == PosTag::prep) x[noun_prep_count] += 1;
  }
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (tags[i] == PosTag::det) continue;
    x[pronoun_subject] = tags[i] == PosTag::pron ? 1.0 : 0.0;
    break;
  }
  return x;
}

FeatureVector featurize(std::string_view term, std::string_view sentence, const Tagger& tagger) {
  return featurize(term, tokenize_and_tag(sentence, tagger));
}

}  // namespace topicpages
