#include "topicpages/corpus.hpp"

#include <algorithm>
#include <array>
#include <unordered_set>

#include "topicpages/error.hpp"
#include "topicpages/utf8.hpp"
#include "xml_reader.hpp"

namespace topicpages {

namespace {

constexpr std::array<std::string_view, 10> kPosNames = {"NOUN", "VERB", "ADJ",  "ADV",   "DET",
                                                        "PREP", "PRON", "NUM", "PUNCT", "OTHER"};

constexpr std::array<std::string_view, 9> kAbbreviations = {"al.", "Fig.", "Eq.", "e.g.", "i.e.",
                                                            "et.", "vs.",  "Dr.", "No."};

bool is_ascii_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

bool is_closing(char32_t cp) {
  return cp == ')' || cp == ']' || cp == '}' || cp == '"' || cp == '\'' || cp == 0x201D || cp == 0x2019;
}

bool is_opening(char32_t cp) {
  return cp == '(' || cp == '[' || cp == '{' || cp == '"' || cp == '\'' || cp == 0x201C || cp == 0x2018;
}

bool is_terminator(char c) { return c == '.' || c == '?' || c == '!'; }

// True when text[pos] == '\n' starts a blank line (another '\n' follows
// before any non-space character).
bool blank_line_at(std::string_view text, std::size_t pos) {
  if (text[pos] != '\n') return false;
  for (std::size_t i = pos + 1; i < text.size(); ++i) {
    if (text[i] == '\n') return true;
    if (!is_ascii_space(text[i])) return false;
  }
  return false;
}

std::size_t trim_back(std::string_view text, std::size_t begin, std::size_t end) {
  while (end > begin && is_ascii_space(text[end - 1])) --end;
  return end;
}

bool ends_with_abbreviation(std::string_view text, std::size_t dot) {
  std::size_t start = dot;
  while (start > 0 && !is_ascii_space(text[start - 1])) --start;
  auto word = text.substr(start, dot + 1 - start);
  while (!word.empty() && is_opening(static_cast<unsigned char>(word.front()))) word.remove_prefix(1);
  return std::find(kAbbreviations.begin(), kAbbreviations.end(), word) != kAbbreviations.end();
}

std::string collapse_whitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (std::size_t i = 0; i < text.size();) {
    const auto d = utf8::decode(text, i);
    if (utf8::is_space(d.codepoint)) {
      pending_space = !out.empty();
    } else {
      if (pending_space) out += ' ';
      pending_space = false;
      out.append(text.substr(i, d.length));
    }
    i += d.length;
  }
  return out;
}

bool has_content(std::string_view text) {
  return std::any_of(text.begin(), text.end(), [](char c) { return !is_ascii_space(c); });
}

}  // namespace

std::string_view to_string(PosTag tag) { return kPosNames[static_cast<std::size_t>(tag)]; }

std::optional<PosTag> parse_pos_tag(std::string_view name) {
  for (std::size_t i = 0; i < kPosNames.size(); ++i) {
    if (kPosNames[i] == name) return static_cast<PosTag>(i);
  }
  return std::nullopt;
}

std::string_view to_string(SourceKind kind) {
  switch (kind) {
    case SourceKind::journal_article:
      return "journal-article";
    case SourceKind::book_chapter:
      return "book-chapter";
    case SourceKind::plain_text:
      return "plain-text";
  }
  return "plain-text";
}

std::optional<SourceKind> parse_source_kind(std::string_view name) {
  if (name == "journal-article") return SourceKind::journal_article;
  if (name == "book-chapter") return SourceKind::book_chapter;
  if (name == "plain-text") return SourceKind::plain_text;
  return std::nullopt;
}

Corpus::Corpus(std::vector<Document> documents) {
  for (auto& d : documents) add(std::move(d));
}

void Corpus::add(Document doc) {
  if (doc.doc_id.empty()) throw DataError("document without doc_id");
  if (find(doc.doc_id) != nullptr) throw DataError("duplicate doc_id '" + doc.doc_id + "'");
  documents_.push_back(std::move(doc));
}

const Document* Corpus::find(std::string_view doc_id) const {
  const auto it = std::find_if(documents_.begin(), documents_.end(),
                               [&](const Document& d) { return d.doc_id == doc_id; });
  return it == documents_.end() ? nullptr : &*it;
}

const Snippet* Corpus::find_snippet(std::string_view doc_id, std::size_t snippet_index) const {
  const auto* doc = find(doc_id);
  if (doc == nullptr || snippet_index >= doc->snippets.size()) return nullptr;
  return &doc->snippets[snippet_index];
}

std::vector<Token> tokenize(std::string_view text, std::size_t offset) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    const auto d = utf8::decode(text, i);
    if (utf8::is_space(d.codepoint)) {
      i += d.length;
      continue;
    }
    const auto start = i;
    if (utf8::is_word_char(d.codepoint) || d.codepoint == '-') {
      i += d.length;
      while (i < text.size()) {
        const auto n = utf8::decode(text, i);
        if (!utf8::is_word_char(n.codepoint) && n.codepoint != '-') break;
        i += n.length;
      }
    } else {
      i += d.length;
    }
    tokens.push_back({std::string(text.substr(start, i - start)), {offset + start, offset + i}});
  }
  return tokens;
}

std::span<const std::string_view> sentence_abbreviations() { return kAbbreviations; }

std::vector<Span> split_sentences(std::string_view text) {
  std::vector<Span> spans;
  std::size_t i = 0;
  const auto n = text.size();
  auto skip_space = [&](std::size_t p) {
    while (p < n && is_ascii_space(text[p])) ++p;
    return p;
  };

  std::size_t start = skip_space(0);
  i = start;
  while (i < n) {
    if (blank_line_at(text, i)) {
      const auto end = trim_back(text, start, i);
      if (end > start) spans.push_back({start, end});
      start = i = skip_space(i);
      continue;
    }
    if (!is_terminator(text[i])) {
      ++i;
      continue;
    }
    const auto dot = i;
    std::size_t j = i + 1;
    while (j < n && is_terminator(text[j])) ++j;
    while (j < n) {
      const auto d = utf8::decode(text, j);
      if (!is_closing(d.codepoint)) break;
      j += d.length;
    }
    if (j >= n || !is_ascii_space(text[j])) {
      i = j;
      continue;
    }
    std::size_t k = skip_space(j);
    std::size_t probe = k;
    while (probe < n) {
      const auto d = utf8::decode(text, probe);
      if (!is_opening(d.codepoint)) break;
      probe += d.length;
    }
    const bool upper_follows = probe < n && utf8::is_upper(utf8::decode(text, probe).codepoint);
    const bool abbreviation = text[dot] == '.' && j == dot + 1 && ends_with_abbreviation(text, dot);
    if (upper_follows && !abbreviation) {
      spans.push_back({start, j});
      start = i = k;
    } else {
      i = j;
    }
  }
  if (start < n) {
    const auto end = trim_back(text, start, n);
    if (end > start) spans.push_back({start, end});
  }
  return spans;
}

TaggedTokens tokenize_and_tag(std::string_view sentence, const Tagger& tagger) {
  TaggedTokens out;
  out.tokens = tokenize(sentence);
  out.tags = tagger.tag(out.tokens);
  return out;
}

Snippet build_snippet(std::string doc_id, std::size_t index, std::optional<std::string> heading,
                      std::string text, const Tagger& tagger) {
  Snippet snippet;
  snippet.doc_id = std::move(doc_id);
  snippet.index = index;
  snippet.heading = std::move(heading);
  snippet.text = std::move(text);
  const std::string_view view = snippet.text;
  for (const auto& span : split_sentences(view)) {
    Sentence s;
    s.span = span;
    s.tokens = tokenize(view.substr(span.begin, span.size()), span.begin);
    s.pos_tags = tagger.tag(s.tokens);
    snippet.token_count += s.tokens.size();
    snippet.sentences.push_back(std::move(s));
  }
  return snippet;
}

namespace {

struct Section {
  std::optional<std::string> heading;
  std::vector<std::string> paragraphs;
};

class ArticleWalker {
 public:
  void body(const xml::Node& body) {
    Section loose;
    for (const auto& child : body.children) {
      if (child.is_text) {
        if (has_content(child.text)) loose.paragraphs.push_back(collapse_whitespace(child.text));
        continue;
      }
      if (child.name == "sec") {
        flush(loose);
        section(child);
      } else if (child.name == "title") {
        continue;
      } else {
        pending_.clear();
        block(child, loose);
        if (!pending_.empty()) {
          const auto nested = std::move(pending_);
          pending_.clear();
          flush(loose);
          for (const auto* s : nested) section(*s);
        }
      }
    }
    flush(loose);
  }

  std::vector<Section> sections;

 private:
  void flush(Section& loose) {
    if (!loose.paragraphs.empty()) sections.push_back(std::move(loose));
    loose = Section{};
  }

  static bool contains_section(const xml::Node& node) {
    return std::any_of(node.children.begin(), node.children.end(), [](const xml::Node& c) {
      return !c.is_text && (c.name == "sec" || contains_section(c));
    });
  }

  // A block-level element inside a section: paragraphs and unknown elements
  // contribute their text; unknown containers holding sections are walked
  // transparently.
  void block(const xml::Node& node, Section& current) {
    if (node.name != "p" && contains_section(node)) {
      for (const auto& c : node.children) {
        if (c.is_text) {
          if (has_content(c.text)) current.paragraphs.push_back(collapse_whitespace(c.text));
        } else if (c.name == "sec") {
          pending_.push_back(&c);
        } else {
          block(c, current);
        }
      }
      return;
    }
    auto text = collapse_whitespace(node.inner_text());
    if (!text.empty()) current.paragraphs.push_back(std::move(text));
  }

  void section(const xml::Node& sec) {
    const auto slot = sections.size();
    sections.emplace_back();
    Section current;
    std::vector<const xml::Node*> children;
    bool have_heading = false;
    for (const auto& c : sec.children) {
      if (c.is_text) {
        if (has_content(c.text)) current.paragraphs.push_back(collapse_whitespace(c.text));
      } else if (c.name == "title" && !have_heading) {
        current.heading = collapse_whitespace(c.inner_text());
        have_heading = true;
      } else if (c.name == "sec") {
        children.push_back(&c);
      } else {
        pending_.clear();
        block(c, current);
        children.insert(children.end(), pending_.begin(), pending_.end());
        pending_.clear();
      }
    }
    sections[slot] = std::move(current);
    for (const auto* child : children) section(*child);
  }

  std::vector<const xml::Node*> pending_;
};

std::string join_paragraphs(const std::vector<std::string>& paragraphs) {
  std::string text;
  for (const auto& p : paragraphs) {
    if (!text.empty()) text += "\n\n";
    text += p;
  }
  return text;
}

Document parse_xml_document(std::string_view raw, const ParseOptions& options, const Tagger& tagger) {
  const auto root = xml::parse(raw);
  if (root.name != "article") throw ParseError("root element must be <article>, found <" + root.name + ">", 0);

  Document doc;
  const auto* id = root.attribute("id");
  doc.doc_id = id != nullptr ? *id : options.doc_id;
  if (doc.doc_id.empty()) throw DataError("document has no id attribute and no fallback doc_id");
  const auto* domain = root.attribute("domain");
  doc.domain = domain != nullptr ? *domain : options.domain;
  doc.source_kind = options.source_kind.value_or(SourceKind::journal_article);
  if (const auto* type = root.attribute("type")) {
    const auto kind = parse_source_kind(*type);
    if (!kind) throw DataError("unknown article type '" + *type + "'");
    doc.source_kind = *kind;
  }
  if (const auto* title = root.child("title")) doc.title = collapse_whitespace(title->inner_text());

  const auto* body = root.child("body");
  if (body == nullptr) throw DataError("no content: <article> has no <body>");

  ArticleWalker walker;
  walker.body(*body);
  bool any_text = false;
  for (std::size_t i = 0; i < walker.sections.size(); ++i) {
    auto& sec = walker.sections[i];
    auto text = join_paragraphs(sec.paragraphs);
    any_text = any_text || !text.empty();
    doc.snippets.push_back(build_snippet(doc.doc_id, i, std::move(sec.heading), std::move(text), tagger));
  }
  if (!any_text) throw DataError("no content in document '" + doc.doc_id + "'");
  return doc;
}

Document parse_plain_document(std::string_view raw, const ParseOptions& options, const Tagger& tagger) {
  Document doc;
  doc.doc_id = options.doc_id;
  if (doc.doc_id.empty()) throw DataError("plain-text document requires a doc_id");
  doc.domain = options.domain;
  doc.source_kind = options.source_kind.value_or(SourceKind::plain_text);

  std::vector<std::string> blocks;
  std::string current;
  std::size_t pos = 0;
  while (pos <= raw.size()) {
    auto nl = raw.find('\n', pos);
    if (nl == std::string_view::npos) nl = raw.size();
    auto line = raw.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (has_content(line)) {
      if (!current.empty()) current += '\n';
      current += line;
    } else if (!current.empty()) {
      blocks.push_back(std::move(current));
      current.clear();
    }
    pos = nl + 1;
  }
  if (!current.empty()) blocks.push_back(std::move(current));
  if (blocks.empty()) throw DataError("no content in document '" + doc.doc_id + "'");

  const auto first_line = blocks.front().substr(0, blocks.front().find('\n'));
  doc.title = collapse_whitespace(first_line);
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    doc.snippets.push_back(build_snippet(doc.doc_id, i, std::nullopt, std::move(blocks[i]), tagger));
  }
  return doc;
}

}  // namespace

Document parse_document(std::string_view raw, InputFormat format, const ParseOptions& options,
                        const Tagger& tagger) {
  if (!utf8::is_valid(raw)) {
    std::size_t bad = 0;
    while (bad < raw.size()) {
      const auto d = utf8::decode(raw, bad);
      if (d.codepoint == 0xFFFD && d.length == 1) break;
      bad += d.length;
    }
    throw ParseError("input is not valid UTF-8", bad);
  }
  return format == InputFormat::xml ? parse_xml_document(raw, options, tagger)
                                    : parse_plain_document(raw, options, tagger);
}

}  // namespace topicpages
