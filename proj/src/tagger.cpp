#include <algorithm>
#include <string>
#include <unordered_map>

#include "topicpages/corpus.hpp"
#include "topicpages/utf8.hpp"

namespace topicpages {

namespace {

// Lexical classes before contextual resolution. Verb forms stay distinct
// because their final tag depends on the neighbours.
enum class Lex {
  fixed,       // tag is final
  verb_base,   // "use", "rank"
  verb_3sg,    // "uses"
  verb_past,   // "used", "shown"
  verb_ing,    // "using"
  that_word,   // determiner or pronoun
};

struct Entry {
  Lex lex = Lex::fixed;
  PosTag tag = PosTag::noun;
};

using Lexicon = std::unordered_map<std::string, Entry>;

void add_fixed(Lexicon& lex, std::initializer_list<const char*> words, PosTag tag) {
  for (const char* w : words) lex[w] = {Lex::fixed, tag};
}

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

std::string third_person(const std::string& base) {
  const auto n = base.size();
  if (n >= 2 && base[n - 1] == 'y' && !is_vowel(base[n - 2])) return base.substr(0, n - 1) + "ies";
  if (base.ends_with("s") || base.ends_with("sh") || base.ends_with("ch") || base.ends_with("x") ||
      base.ends_with("z") || base.ends_with("o"))
    return base + "es";
  return base + "s";
}

std::string past(const std::string& base) {
  const auto n = base.size();
  if (base.ends_with("e")) return base + "d";
  if (n >= 2 && base[n - 1] == 'y' && !is_vowel(base[n - 2])) return base.substr(0, n - 1) + "ied";
  return base + "ed";
}

std::string gerund(const std::string& base) {
  if (base.ends_with("ie")) return base.substr(0, base.size() - 2) + "ying";
  if (base.ends_with("e") && !base.ends_with("ee")) return base.substr(0, base.size() - 1) + "ing";
  return base + "ing";
}

void add_verb(Lexicon& lex, const std::string& base, std::initializer_list<const char*> irregular_past = {}) {
  lex.try_emplace(base, Entry{Lex::verb_base, PosTag::verb});
  lex.try_emplace(third_person(base), Entry{Lex::verb_3sg, PosTag::verb});
  lex.try_emplace(gerund(base), Entry{Lex::verb_ing, PosTag::verb});
  if (irregular_past.size() == 0) {
    lex.try_emplace(past(base), Entry{Lex::verb_past, PosTag::verb});
  } else {
    for (const char* p : irregular_past) lex.try_emplace(p, Entry{Lex::verb_past, PosTag::verb});
  }
}

Lexicon build_lexicon() {
  Lexicon lex;
  add_fixed(lex, {"a", "an", "the", "this", "these", "those", "each", "every", "some", "any", "no", "its", "their",
                  "his", "her", "our", "my", "your", "both", "either", "neither", "another", "such", "all"},
            PosTag::det);
  add_fixed(lex, {"it", "they", "we", "he", "she", "i", "you", "them", "us", "him", "me", "which", "who", "whom",
                  "whose", "there", "itself", "themselves", "others", "something", "anything", "everything",
                  "nothing", "what"},
            PosTag::pron);
  add_fixed(lex, {"of",      "in",     "on",     "at",     "by",      "for",    "with",   "from",   "to",
                  "into",    "onto",   "over",   "under",  "between", "through", "during", "after",  "before",
                  "as",      "than",   "about",  "without", "within", "across", "per",    "via",    "among",
                  "against", "upon",   "near",   "along",  "toward",  "towards", "around", "beyond", "despite",
                  "since",   "until",  "behind", "below",  "above",   "like",   "except", "throughout"},
            PosTag::prep);
  add_fixed(lex, {"and", "or", "but", "nor", "if", "because", "while", "whereas", "although", "though", "so",
                  "yet", "whether", "unless", "when", "where", "how", "why"},
            PosTag::other);
  add_fixed(lex, {"not",    "also",    "often",  "very",    "too",   "only",   "then",    "thus",  "therefore",
                  "however", "still",  "always", "usually", "never", "already", "just",   "quite", "rather",
                  "almost", "here",    "even",   "again",   "well",  "much",   "further", "now",   "later",
                  "first",  "together", "instead", "perhaps", "ever", "once",   "away"},
            PosTag::adv);
  add_fixed(lex, {"is", "are", "was", "were", "be", "been", "being", "am", "has", "have", "had", "having", "do",
                  "does", "did", "can", "could", "may", "might", "will", "would", "shall", "should", "must"},
            PosTag::verb);
  add_fixed(lex, {"one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten", "eleven",
                  "twelve", "twenty", "hundred", "thousand", "million", "billion", "zero"},
            PosTag::num);
  add_fixed(lex, {"large",    "small",    "simple",  "new",     "common",   "high",     "low",       "good",
                  "bad",      "important", "different", "similar", "many",   "several",  "few",       "other",
                  "same",     "main",     "basic",   "fast",    "slow",     "old",      "young",     "strong",
                  "weak",     "early",    "late",    "recent",  "useful",   "available", "possible", "able",
                  "general",  "specific", "generic", "complex", "linear",   "random",   "hidden",    "binary",
                  "rare",     "frequent", "stable",  "robust",  "symmetric", "sensitive", "efficient",
                  "difficult", "easy",    "poor",    "central", "global",   "local",    "standard",  "top",
                  "macro",    "micro",    "higher",  "lower",   "larger",   "smaller",  "longer",    "shorter",
                  "better",   "best",     "worst",   "future",  "deep",     "most",     "more",      "less",
                  "least",    "related",  "whole",   "full",    "true",     "false",    "real",      "major",
                  "minor",    "key",      "free",    "open",    "clear",    "certain",  "various",   "numerous",
                  "own",      "next",     "last",    "previous", "final",   "initial",  "single",    "double",
                  "wide",     "narrow",   "short",   "long",    "big",      "little",   "great",     "hard",
                  "soft",     "correct",  "wrong",   "due",     "likely",   "unlikely", "prime",     "positive",
                  "negative", "mean",     "red",     "blue",    "green",    "black",    "white"},
            PosTag::adj);

  for (const char* v :
       {"use",      "estimate", "train",    "work",     "decrease", "increase", "collect",   "store",
        "ignore",   "report",   "perform",  "require",  "control",  "minimize", "maximize",  "propose",
        "repeat",   "normalize", "analyze", "predict",  "extract",  "depend",   "receive",   "rank",
        "amplify",  "appear",   "add",      "visit",    "help",     "compute",  "include",   "vary",
        "achieve",  "return",   "reject",   "close",    "combine",  "learn",    "update",    "ensure",
        "consist",  "range",    "indicate", "describe", "solve",    "fill",     "sort",      "measure",
        "differ",   "confirm",  "address",  "produce",  "apply",    "reduce",   "improve",   "compare",
        "rely",     "obtain",   "yield",    "follow",   "imply",    "establish", "publish",  "justify",
        "move",     "converge", "prevent",  "monitor",  "assess",   "map",      "define",    "refer",
        "denote",   "call",     "study",    "provide",  "allow",    "represent", "consider", "present",
        "evaluate", "select",   "generate", "classify", "quantify", "illustrate", "remain",  "cause",
        "stop",     "need",     "want",     "occur",    "exist",    "change",   "create",    "develop",
        "determine", "identify", "introduce", "observe", "offer",   "suggest",  "explain",   "contain",
        "show",     "mean",     "seem",     "tend",     "try",      "look",     "ask",       "answer",
        "implement", "invest",  "draw",     "plot",     "compute",  "approximate", "fit",    "split",
        "lie",      "shrink",   "slow",     "guarantee", "fund",    "extend",   "become",    "rise",
        "summarize", "tune",    "label",    "output",   "converge", "choose",   "process",   "encode",
        "decode",   "search",   "insert",   "delete",   "detect",   "annotate", "match",     "discard",
        "emit",     "write",    "read",     "send",     "run",      "find",     "take",      "give",
        "make",     "lead",     "build",    "keep",     "begin",    "grow",     "see",       "know",
        "get",      "go",       "come",     "think",    "say",      "win",      "hold",      "set"}) {
    const std::string base = v;
    if (base == "run") add_verb(lex, base, {"ran"});
    else if (base == "find") add_verb(lex, base, {"found"});
    else if (base == "take") add_verb(lex, base, {"took", "taken"});
    else if (base == "give") add_verb(lex, base, {"gave", "given"});
    else if (base == "make") add_verb(lex, base, {"made"});
    else if (base == "lead") add_verb(lex, base, {"led"});
    else if (base == "build") add_verb(lex, base, {"built"});
    else if (base == "keep") add_verb(lex, base, {"kept"});
    else if (base == "begin") add_verb(lex, base, {"began", "begun"});
    else if (base == "grow") add_verb(lex, base, {"grew", "grown"});
    else if (base == "see") add_verb(lex, base, {"saw", "seen"});
    else if (base == "know") add_verb(lex, base, {"knew", "known"});
    else if (base == "get") add_verb(lex, base, {"got", "gotten"});
    else if (base == "go") add_verb(lex, base, {"went", "gone"});
    else if (base == "come") add_verb(lex, base, {"came"});
    else if (base == "think") add_verb(lex, base, {"thought"});
    else if (base == "say") add_verb(lex, base, {"said"});
    else if (base == "win") add_verb(lex, base, {"won"});
    else if (base == "hold") add_verb(lex, base, {"held"});
    else if (base == "set") add_verb(lex, base, {"set"});
    else if (base == "write") add_verb(lex, base, {"wrote", "written"});
    else if (base == "read") add_verb(lex, base, {"read"});
    else if (base == "send") add_verb(lex, base, {"sent"});
    else if (base == "draw") add_verb(lex, base, {"drew", "drawn"});
    else if (base == "split") add_verb(lex, base, {"split"});
    else if (base == "become") add_verb(lex, base, {"became"});
    else if (base == "rise") add_verb(lex, base, {"rose", "risen"});
    else if (base == "choose") add_verb(lex, base, {"chose", "chosen"});
    else if (base == "show") add_verb(lex, base, {"showed", "shown"});
    else if (base == "shrink") add_verb(lex, base, {"shrank", "shrunk"});
    else if (base == "lie") add_verb(lex, base, {"lay"});
    else if (base == "fit") add_verb(lex, base, {"fitted"});
    else if (base == "mean") add_verb(lex, base, {"meant"});
    else if (base == "plot") add_verb(lex, base, {"plotted"});
    else if (base == "map") add_verb(lex, base, {"mapped"});
    else if (base == "stop") add_verb(lex, base, {"stopped"});
    else if (base == "refer") add_verb(lex, base, {"referred"});
    else if (base == "output") add_verb(lex, base, {"output"});
    else add_verb(lex, base);
  }
  // Fixes for generated forms that collide with common nouns or adjectives.
  lex["means"] = {Lex::verb_3sg, PosTag::verb};
  lex["that"] = {Lex::that_word, PosTag::det};
  return lex;
}

const Lexicon& lexicon() {
  static const Lexicon lex = build_lexicon();
  return lex;
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool has_word_char(std::string_view s) {
  for (std::size_t i = 0; i < s.size();) {
    const auto d = utf8::decode(s, i);
    if (utf8::is_word_char(d.codepoint)) return true;
    i += d.length;
  }
  return false;
}

bool is_number(std::string_view s) {
  if (!s.empty() && s.front() == '-') s.remove_prefix(1);
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return (c >= '0' && c <= '9'); });
}

bool starts_upper(std::string_view s) { return !s.empty() && utf8::is_upper(utf8::decode(s, 0).codepoint); }

// Suffix rules for words missing from the lexicon.
Entry by_suffix(const std::string& w) {
  auto ends = [&](std::string_view suffix) { return w.size() > suffix.size() + 2 && w.ends_with(suffix); };
  if (ends("ly")) return {Lex::fixed, PosTag::adv};
  if (ends("ing")) return {Lex::verb_ing, PosTag::verb};
  if (ends("ed")) return {Lex::verb_past, PosTag::verb};
  for (const char* s : {"tion", "sion", "ment", "ness", "ity", "ism", "ance", "ence", "ure", "ogy", "ics", "ship",
                        "ist", "er", "or", "ist", "age"}) {
    if (ends(s)) return {Lex::fixed, PosTag::noun};
  }
  for (const char* s : {"ous", "ful", "ive", "able", "ible", "al", "ic", "less", "ary", "ian", "ular", "ant",
                        "ent"}) {
    if (ends(s)) return {Lex::fixed, PosTag::adj};
  }
  return {Lex::fixed, PosTag::noun};
}

bool nominal(PosTag t) { return t == PosTag::noun || t == PosTag::pron; }

bool is_copula_or_aux(std::string_view lower) {
  return lower == "is" || lower == "are" || lower == "was" || lower == "were" || lower == "be" || lower == "been" ||
         lower == "being" || lower == "has" || lower == "have" || lower == "had" || lower == "can" ||
         lower == "may" || lower == "will" || lower == "would" || lower == "should" || lower == "must" ||
         lower == "could" || lower == "might";
}

}  // namespace

std::vector<PosTag> LexiconTagger::tag(std::span<const Token> tokens) const {
  const auto& lex = lexicon();
  const auto n = tokens.size();
  std::vector<Entry> entries(n);
  std::vector<std::string> lower(n);

  for (std::size_t i = 0; i < n; ++i) {
    const auto& text = tokens[i].text;
    lower[i] = ascii_lower(text);
    if (!has_word_char(text)) {
      entries[i] = {Lex::fixed, is_number(text) ? PosTag::num : PosTag::punct};
      continue;
    }
    if (is_number(text)) {
      entries[i] = {Lex::fixed, PosTag::num};
      continue;
    }
    // Sentence-initial capitals are ambiguous; elsewhere they mark names.
    const bool first_word = std::none_of(tokens.begin(), tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                         [](const Token& t) { return has_word_char(t.text); });
    if (const auto it = lex.find(lower[i]); it != lex.end() && (first_word || !starts_upper(text) ||
                                                                it->second.tag != PosTag::noun)) {
      entries[i] = it->second;
      if (!first_word && starts_upper(text) && it->second.lex != Lex::fixed) entries[i] = {Lex::fixed, PosTag::noun};
      continue;
    }
    if (!first_word && starts_upper(text)) {
      entries[i] = {Lex::fixed, PosTag::noun};
      continue;
    }
    const bool has_digit = std::any_of(text.begin(), text.end(), [](char c) { return c >= '0' && c <= '9'; });
    entries[i] = has_digit ? Entry{Lex::fixed, PosTag::noun} : by_suffix(lower[i]);
  }

  // Contextual pass, left to right, so each decision sees resolved tags.
  std::vector<PosTag> tags(n, PosTag::noun);
  bool seen_verb = false;
  for (std::size_t i = 0; i < n; ++i) {
    const bool has_prev = i > 0;
    const PosTag prev = has_prev ? tags[i - 1] : PosTag::other;
    const auto next_entry = i + 1 < n ? std::optional<Entry>(entries[i + 1]) : std::nullopt;
    const bool next_is_nounish =
        next_entry && next_entry->lex == Lex::fixed &&
        (next_entry->tag == PosTag::noun || next_entry->tag == PosTag::adj);
    const bool next_is_noun_or_verbish =
        next_entry && (next_is_nounish || next_entry->lex == Lex::verb_3sg || next_entry->lex == Lex::verb_base);
    const bool after_modifier =
        has_prev && (prev == PosTag::det || prev == PosTag::adj || prev == PosTag::prep || prev == PosTag::num);
    const bool after_aux = i > 0 && is_copula_or_aux(lower[i - 1]);

    PosTag t = entries[i].tag;
    switch (entries[i].lex) {
      case Lex::fixed:
        if (t == PosTag::adj && lower[i] == "mean" && has_prev && prev == PosTag::det && !next_is_nounish) {
          t = PosTag::noun;
        } else if (t == PosTag::adv && lower[i] == "first" && has_prev && prev == PosTag::det) {
          t = PosTag::adj;
        }
        break;
      case Lex::that_word:
        t = next_is_nounish && !(has_prev && nominal(prev)) ? PosTag::det : PosTag::pron;
        break;
      case Lex::verb_base:
        if (after_modifier && !(has_prev && prev == PosTag::prep && i > 0 && lower[i - 1] == "to")) {
          t = PosTag::noun;
        } else if (!has_prev) {
          t = next_is_noun_or_verbish ? PosTag::noun : PosTag::verb;
        } else if (has_prev && prev == PosTag::noun && seen_verb && !after_aux) {
          t = PosTag::noun;
        } else {
          t = PosTag::verb;
        }
        break;
      case Lex::verb_3sg:
        if (after_modifier || !has_prev) {
          t = PosTag::noun;
        } else if (has_prev && prev == PosTag::noun && seen_verb) {
          t = PosTag::noun;
        } else if (has_prev && prev == PosTag::other) {
          t = PosTag::noun;
        } else {
          t = PosTag::verb;
        }
        break;
      case Lex::verb_past:
        if (has_prev && (prev == PosTag::det || prev == PosTag::adj) && next_is_nounish) {
          t = PosTag::adj;
        } else if (!has_prev && next_is_nounish) {
          t = PosTag::adj;
        } else if (!after_aux && seen_verb && next_is_nounish) {
          t = PosTag::adj;
        } else {
          t = PosTag::verb;
        }
        break;
      case Lex::verb_ing:
        if (has_prev && prev == PosTag::det && next_is_nounish) {
          t = PosTag::adj;
        } else if (!has_prev || after_modifier || (has_prev && prev == PosTag::noun && !after_aux)) {
          t = PosTag::noun;
        } else if (has_prev && prev == PosTag::verb && !after_aux && next_is_nounish) {
          t = PosTag::adj;
        } else {
          t = PosTag::verb;
        }
        break;
    }
    tags[i] = t;
    if (t == PosTag::verb) seen_verb = true;
  }
  return tags;
}

const Tagger& default_tagger() {
  static const LexiconTagger tagger;
  return tagger;
}

}  // namespace topicpages
