#include "xml_reader.hpp"

#include <cstdint>

#include "topicpages/error.hpp"
#include "topicpages/utf8.hpp"

namespace topicpages::xml {

const std::string* Node::attribute(std::string_view key) const {
  for (const auto& [k, v] : attributes) {
    if (k == key) return &v;
  }
  return nullptr;
}

const Node* Node::child(std::string_view element_name) const {
  for (const auto& c : children) {
    if (!c.is_text && c.name == element_name) return &c;
  }
  return nullptr;
}

namespace {

void collect_text(const Node& node, std::string& out) {
  if (node.is_text) {
    out += node.text;
    return;
  }
  for (const auto& c : node.children) collect_text(c, out);
}

bool is_name_start(char c) {
  const auto u = static_cast<unsigned char>(c);
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c == ':' || u >= 0x80;
}

bool is_name_char(char c) {
  return is_name_start(c) || (c >= '0' && c <= '9') || c == '-' || c == '.';
}

bool is_xml_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

class Reader {
 public:
  explicit Reader(std::string_view raw) : src_(raw) {}

  Node document() {
    if (src_.substr(0, 3) == "\xEF\xBB\xBF") pos_ = 3;
    skip_misc();
    if (at_end() || peek() != '<') fail("expected root element");
    Node root = element();
    skip_misc();
    if (!at_end()) fail("content after root element");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError("malformed XML: " + what, pos_); }

  bool at_end() const { return pos_ >= src_.size(); }
  char peek() const { return src_[pos_]; }
  bool starts_with(std::string_view s) const { return src_.substr(pos_, s.size()) == s; }

  void expect(std::string_view s) {
    if (!starts_with(s)) fail("expected '" + std::string(s) + "'");
    pos_ += s.size();
  }

  void skip_space() {
    while (!at_end() && is_xml_space(peek())) ++pos_;
  }

  void skip_until(std::string_view terminator, const char* what) {
    const auto found = src_.find(terminator, pos_);
    if (found == std::string_view::npos) fail(std::string("unterminated ") + what);
    pos_ = found + terminator.size();
  }

  // Whitespace, comments, PIs and DOCTYPE outside the root element.
  void skip_misc() {
    for (;;) {
      skip_space();
      if (starts_with("<?")) {
        skip_until("?>", "processing instruction");
      } else if (starts_with("<!--")) {
        skip_until("-->", "comment");
      } else if (starts_with("<!DOCTYPE")) {
        int depth = 0;
        for (; !at_end(); ++pos_) {
          const char c = peek();
          if (c == '[') ++depth;
          if (c == ']') --depth;
          if (c == '>' && depth == 0) break;
        }
        if (at_end()) fail("unterminated DOCTYPE");
        ++pos_;
      } else {
        return;
      }
    }
  }

  std::string name() {
    if (at_end() || !is_name_start(peek())) fail("expected name");
    const auto start = pos_;
    while (!at_end() && is_name_char(peek())) ++pos_;
    return std::string(src_.substr(start, pos_ - start));
  }

  void entity(std::string& out) {
    const auto start = pos_;
    const auto semi = src_.find(';', pos_);
    if (semi == std::string_view::npos || semi - pos_ > 12) fail("unterminated entity reference");
    const auto ref = src_.substr(pos_ + 1, semi - pos_ - 1);
    if (ref == "amp") {
      out += '&';
    } else if (ref == "lt") {
      out += '<';
    } else if (ref == "gt") {
      out += '>';
    } else if (ref == "quot") {
      out += '"';
    } else if (ref == "apos") {
      out += '\'';
    } else if (!ref.empty() && ref[0] == '#') {
      std::uint32_t cp = 0;
      const bool hex = ref.size() > 1 && (ref[1] == 'x' || ref[1] == 'X');
      const auto digits = ref.substr(hex ? 2 : 1);
      if (digits.empty()) fail("empty character reference");
      for (const char c : digits) {
        std::uint32_t d = 0;
        if (c >= '0' && c <= '9') {
          d = static_cast<std::uint32_t>(c - '0');
        } else if (hex && c >= 'a' && c <= 'f') {
          d = static_cast<std::uint32_t>(c - 'a' + 10);
        } else if (hex && c >= 'A' && c <= 'F') {
          d = static_cast<std::uint32_t>(c - 'A' + 10);
        } else {
          pos_ = start;
          fail("bad character reference");
        }
        cp = cp * (hex ? 16 : 10) + d;
        if (cp > 0x10FFFF) {
          pos_ = start;
          fail("character reference out of range");
        }
      }
      utf8::append(out, static_cast<char32_t>(cp));
    } else {
      fail("unknown entity '" + std::string(ref) + "'");
    }
    pos_ = semi + 1;
  }

  std::string attribute_value() {
    if (at_end() || (peek() != '"' && peek() != '\'')) fail("expected quoted attribute value");
    const char quote = peek();
    ++pos_;
    std::string value;
    while (!at_end() && peek() != quote) {
      if (peek() == '<') fail("'<' in attribute value");
      if (peek() == '&') {
        entity(value);
      } else {
        value += peek();
        ++pos_;
      }
    }
    if (at_end()) fail("unterminated attribute value");
    ++pos_;
    return value;
  }

  Node element() {
    expect("<");
    Node node;
    node.name = name();
    for (;;) {
      skip_space();
      if (at_end()) fail("unterminated start tag");
      if (starts_with("/>")) {
        pos_ += 2;
        return node;
      }
      if (peek() == '>') {
        ++pos_;
        break;
      }
      auto key = name();
      skip_space();
      expect("=");
      skip_space();
      node.attributes.emplace_back(std::move(key), attribute_value());
    }
    content(node);
    return node;
  }

  void flush_text(Node& parent, std::string& text) {
    if (text.empty()) return;
    Node t;
    t.is_text = true;
    t.text = std::move(text);
    parent.children.push_back(std::move(t));
    text.clear();
  }

  void content(Node& parent) {
    std::string text;
    for (;;) {
      if (at_end()) fail("missing end tag for <" + parent.name + ">");
      if (starts_with("</")) {
        flush_text(parent, text);
        const auto tag_pos = pos_;
        pos_ += 2;
        const auto end_name = name();
        skip_space();
        expect(">");
        if (end_name != parent.name) {
          pos_ = tag_pos;
          fail("mismatched end tag </" + end_name + "> for <" + parent.name + ">");
        }
        return;
      }
      if (starts_with("<!--")) {
        skip_until("-->", "comment");
      } else if (starts_with("<![CDATA[")) {
        pos_ += 9;
        const auto end = src_.find("]]>", pos_);
        if (end == std::string_view::npos) fail("unterminated CDATA section");
        text += src_.substr(pos_, end - pos_);
        pos_ = end + 3;
      } else if (starts_with("<?")) {
        skip_until("?>", "processing instruction");
      } else if (peek() == '<') {
        flush_text(parent, text);
        parent.children.push_back(element());
      } else if (peek() == '&') {
        entity(text);
      } else {
        text += peek();
        ++pos_;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string Node::inner_text() const {
  std::string out;
  collect_text(*this, out);
  return out;
}

Node parse(std::string_view raw) { return Reader(raw).document(); }

}  // namespace topicpages::xml
