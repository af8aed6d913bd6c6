#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace topicpages {

/// Half-open character (byte) interval [begin, end).
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const noexcept { return end - begin; }
  bool empty() const noexcept { return begin == end; }
  bool contains(const Span& other) const noexcept { return begin <= other.begin && other.end <= end; }
  bool overlaps(const Span& other) const noexcept { return begin < other.end && other.begin < end; }

  friend auto operator<=>(const Span&, const Span&) = default;
};

enum class PosTag { noun, verb, adj, adv, det, prep, pron, num, punct, other };

std::string_view to_string(PosTag tag);
std::optional<PosTag> parse_pos_tag(std::string_view name);

struct Token {
  std::string text;
  Span span;

  friend bool operator==(const Token&, const Token&) = default;
};

struct Sentence {
  Span span;  // within the owning snippet's text
  std::vector<Token> tokens;  // spans within the owning snippet's text
  std::vector<PosTag> pos_tags;

  friend bool operator==(const Sentence&, const Sentence&) = default;
};

struct Snippet {
  std::string doc_id;
  std::size_t index = 0;  // section index within the document
  std::optional<std::string> heading;
  std::string text;
  std::vector<Sentence> sentences;
  std::size_t token_count = 0;

  friend bool operator==(const Snippet&, const Snippet&) = default;
};

enum class SourceKind { journal_article, book_chapter, plain_text };

std::string_view to_string(SourceKind kind);
std::optional<SourceKind> parse_source_kind(std::string_view name);

struct Document {
  std::string doc_id;
  std::string title;
  SourceKind source_kind = SourceKind::plain_text;
  std::string domain;
  std::vector<Snippet> snippets;

  friend bool operator==(const Document&, const Document&) = default;
};

/// A set of documents with unique ids, kept in insertion order.
class Corpus {
 public:
  Corpus() = default;
  explicit Corpus(std::vector<Document> documents);

  void add(Document doc);
  const std::vector<Document>& documents() const noexcept { return documents_; }
  const Document* find(std::string_view doc_id) const;
  const Snippet* find_snippet(std::string_view doc_id, std::size_t snippet_index) const;
  std::size_t size() const noexcept { return documents_.size(); }

 private:
  std::vector<Document> documents_;
};

// ---------------------------------------------------------------------------
// Tokenization and tagging

/// Token = maximal run of letters, digits and hyphens; every other
/// non-space character is a single-character token. Spans are offset by
/// `offset` so callers can tokenize a slice and keep snippet coordinates.
std::vector<Token> tokenize(std::string_view text, std::size_t offset = 0);

class Tagger {
 public:
  virtual ~Tagger() = default;
  virtual std::vector<PosTag> tag(std::span<const Token> tokens) const = 0;
};

/// Closed-class lexicon plus suffix rules, with a small contextual pass.
class LexiconTagger final : public Tagger {
 public:
  std::vector<PosTag> tag(std::span<const Token> tokens) const override;
};

const Tagger& default_tagger();

struct TaggedTokens {
  std::vector<Token> tokens;
  std::vector<PosTag> tags;
};

TaggedTokens tokenize_and_tag(std::string_view sentence, const Tagger& tagger = default_tagger());

// ---------------------------------------------------------------------------
// Sentence splitting

/// Rule-based splitter: a sentence ends at [.?!] (plus closing quotes or
/// brackets) followed by whitespace and an uppercase letter, unless the word
/// ending in '.' is a known abbreviation. Blank lines always end a sentence.
std::vector<Span> split_sentences(std::string_view text);

/// Words (including their final '.') that never end a sentence.
std::span<const std::string_view> sentence_abbreviations();

// ---------------------------------------------------------------------------
// Documents

enum class InputFormat { xml, plain };

struct ParseOptions {
  // Used when the markup does not carry its own values.
  std::string doc_id;
  std::string domain = "General";
  std::optional<SourceKind> source_kind;
};

/// Builds a snippet: splits `text` into sentences, tokenizes and tags them.
Snippet build_snippet(std::string doc_id, std::size_t index, std::optional<std::string> heading,
                      std::string text, const Tagger& tagger = default_tagger());

/// Parses raw bytes into a document. XML input follows the simplified
/// article/body/sec/p schema; plain text becomes one snippet per
/// blank-line-separated block. Throws ParseError / DataError.
Document parse_document(std::string_view raw, InputFormat format, const ParseOptions& options = {},
                        const Tagger& tagger = default_tagger());

}  // namespace topicpages
