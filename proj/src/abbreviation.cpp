// Schwartz & Hearst (2003) abbreviation detection, following the published
// reference implementation's control flow with byte offsets tracked.

#include <algorithm>
#include <optional>

#include <unicode/uchar.h>

#include "topicpages/annotator.hpp"
#include "topicpages/utf8.hpp"

namespace topicpages {

namespace {

struct Chars {
  std::vector<char32_t> cps;
  std::vector<std::size_t> offsets;  // byte offset of each codepoint, plus one past the end
};

Chars decode_all(std::string_view s) {
  Chars c;
  for (std::size_t i = 0; i < s.size();) {
    const auto d = utf8::decode(s, i);
    c.cps.push_back(d.codepoint);
    c.offsets.push_back(i);
    i += d.length;
  }
  c.offsets.push_back(s.size());
  return c;
}

bool alnum(char32_t cp) { return utf8::is_word_char(cp); }

char32_t lower(char32_t cp) {
  if (cp < 0x80) return (cp >= 'A' && cp <= 'Z') ? cp + 32 : cp;
  return static_cast<char32_t>(u_tolower(static_cast<UChar32>(cp)));
}

bool has_letter(std::string_view s) {
  const auto c = decode_all(s);
  return std::any_of(c.cps.begin(), c.cps.end(), utf8::is_letter);
}

bool has_capital(std::string_view s) {
  const auto c = decode_all(s);
  return std::any_of(c.cps.begin(), c.cps.end(), utf8::is_upper);
}

bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; }

std::size_t count_tokens(std::string_view s, std::string_view delims) {
  std::size_t n = 0;
  bool in_token = false;
  for (const char c : s) {
    const bool delim = delims.find(c) != std::string_view::npos;
    if (!delim && !in_token) ++n;
    in_token = !delim;
  }
  return n;
}

// Trimmed view as [begin, end) byte offsets into `s`.
std::pair<std::size_t, std::size_t> trim_bounds(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_ws(s[b])) ++b;
  while (e > b && is_ws(s[e - 1])) --e;
  return {b, e};
}

bool valid_short_form(std::string_view s) {
  if (s.empty() || !has_letter(s)) return false;
  const auto first = utf8::decode(s, 0).codepoint;
  return alnum(first) || first == '(';
}

// Right-to-left character alignment. Returns the byte offset in `long_form`
// where the best (shortest) long form starts, or nullopt.
std::optional<std::size_t> best_long_form(std::string_view short_form, std::string_view long_form) {
  const auto sf = decode_all(short_form);
  const auto lf = decode_all(long_form);
  std::ptrdiff_t l = static_cast<std::ptrdiff_t>(lf.cps.size()) - 1;
  for (std::ptrdiff_t s = static_cast<std::ptrdiff_t>(sf.cps.size()) - 1; s >= 0; --s) {
    const auto c = lower(sf.cps[static_cast<std::size_t>(s)]);
    if (!alnum(c)) continue;
    while ((l >= 0 && lower(lf.cps[static_cast<std::size_t>(l)]) != c) ||
           (s == 0 && l > 0 && alnum(lf.cps[static_cast<std::size_t>(l - 1)]))) {
      --l;
    }
    if (l < 0) return std::nullopt;
    --l;
  }
  // Back up to the start of the word holding the first matched character.
  while (l >= 0 && lf.cps[static_cast<std::size_t>(l)] != ' ') --l;
  return lf.offsets[static_cast<std::size_t>(l + 1)];
}

std::optional<AbbreviationPair> make_pair(std::string_view sentence, std::size_t short_begin, std::size_t short_end,
                                          std::size_t long_begin, std::size_t long_end, Span site,
                                          std::size_t offset) {
  auto short_form = sentence.substr(short_begin, short_end - short_begin);
  auto long_form = sentence.substr(long_begin, long_end - long_begin);
  const auto [sb, se] = trim_bounds(short_form);
  const auto [lb, le] = trim_bounds(long_form);
  short_begin += sb;
  short_end = short_begin + (se - sb);
  long_begin += lb;
  long_end = long_begin + (le - lb);
  short_form = sentence.substr(short_begin, short_end - short_begin);
  long_form = sentence.substr(long_begin, long_end - long_begin);

  const auto short_chars = utf8::length(short_form);
  if (short_chars < 2 || short_chars > 10) return std::nullopt;
  const auto start = best_long_form(short_form, long_form);
  if (!start) return std::nullopt;
  const auto best = long_form.substr(*start);

  const auto long_words = count_tokens(best, " \t\n\r\f-");
  const auto sf = decode_all(short_form);
  const auto short_alnum = static_cast<std::size_t>(std::count_if(sf.cps.begin(), sf.cps.end(), alnum));
  const std::string with_space = std::string(short_form) + " ";
  if (utf8::length(best) < short_chars || best.find(with_space) != std::string_view::npos ||
      best.ends_with(short_form) || long_words > short_alnum * 2 || long_words > short_alnum + 5 ||
      short_alnum > 10) {
    return std::nullopt;
  }

  AbbreviationPair p;
  p.short_form = std::string(short_form);
  p.long_form = std::string(best);
  p.short_span = {offset + short_begin, offset + short_end};
  p.long_span = {offset + long_begin + *start, offset + long_end};
  p.definition_span = {offset + site.begin, offset + site.end};
  return p;
}

}  // namespace

std::vector<AbbreviationPair> detect_abbreviations(std::string_view sentence, std::size_t offset) {
  std::vector<AbbreviationPair> pairs;
  std::size_t base = 0;  // start of the unconsumed remainder within `sentence`
  auto rest = sentence;
  auto open = rest.find(" (");
  while (open != std::string_view::npos) {
    ++open;  // index of '('
    auto close = rest.find(')', open);
    if (close == std::string_view::npos) break;

    const auto dot = rest.rfind(". ", open);
    const auto comma = rest.rfind(", ", open);
    std::size_t long_begin = 0;
    if (dot != std::string_view::npos || comma != std::string_view::npos) {
      const auto boundary = dot == std::string_view::npos     ? comma
                            : comma == std::string_view::npos ? dot
                                                              : std::max(dot, comma);
      long_begin = boundary + 2;
    }
    std::size_t long_end = open;
    std::size_t short_begin = open + 1;
    std::size_t short_end = close;

    if (short_end - short_begin > 1 && long_end > long_begin + 1) {
      auto short_form = rest.substr(short_begin, short_end - short_begin);
      if (short_form.find('(') != std::string_view::npos) {
        const auto nested_close = rest.find(')', close + 1);
        if (nested_close != std::string_view::npos) {
          close = nested_close;
          short_end = close;
        }
      }
      const Span site{base + open, base + close + 1};
      short_form = rest.substr(short_begin, short_end - short_begin);
      if (const auto cut = short_form.find(", "); cut != std::string_view::npos) short_end = short_begin + cut;
      short_form = rest.substr(short_begin, short_end - short_begin);
      if (const auto cut = short_form.find("; "); cut != std::string_view::npos) short_end = short_begin + cut;
      short_form = rest.substr(short_begin, short_end - short_begin);

      bool usable = true;
      if (count_tokens(short_form, " \t\n\r\f") > 2 || short_form.size() > long_end - long_begin) {
        // The parenthesis holds the long form; the short form is the word before it.
        const auto word_end = open >= 1 ? open - 1 : 0;
        const auto space = open >= 2 ? rest.rfind(' ', open - 2) : std::string_view::npos;
        const auto word_begin = space == std::string_view::npos ? 0 : space + 1;
        long_begin = short_begin;
        long_end = short_end;
        short_begin = word_begin;
        short_end = std::max(word_begin, word_end);
        usable = has_capital(rest.substr(short_begin, short_end - short_begin));
      }
      const auto candidate = rest.substr(short_begin, short_end - short_begin);
      if (usable && valid_short_form(candidate)) {
        if (auto p = make_pair(sentence, base + short_begin, base + short_end, base + long_begin, base + long_end,
                               site, offset)) {
          pairs.push_back(std::move(*p));
        }
      }
    }
    base += close + 1;
    rest = sentence.substr(base);
    open = rest.find(" (");
  }
  return pairs;
}

std::vector<AbbreviationPair> detect_abbreviations(const Snippet& snippet) {
  std::vector<AbbreviationPair> out;
  const std::string_view text = snippet.text;
  for (const auto& s : snippet.sentences) {
    auto pairs = detect_abbreviations(text.substr(s.span.begin, s.span.size()), s.span.begin);
    out.insert(out.end(), std::make_move_iterator(pairs.begin()), std::make_move_iterator(pairs.end()));
  }
  return out;
}

}  // namespace topicpages
