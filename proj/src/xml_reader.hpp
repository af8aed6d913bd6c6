#pragma once

// Minimal non-validating XML reader for the simplified article schema.
// Handles elements, attributes, the predefined and numeric entities,
// comments, CDATA, processing instructions and a DOCTYPE without an
// internal subset.

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace topicpages::xml {

struct Node {
  bool is_text = false;
  std::string name;  // element name; empty for text nodes
  std::string text;  // decoded character data for text nodes
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<Node> children;

  const std::string* attribute(std::string_view key) const;
  const Node* child(std::string_view element_name) const;
  // All descendant character data in document order.
  std::string inner_text() const;
};

/// Returns the root element. Throws ParseError with the byte offset.
Node parse(std::string_view raw);

}  // namespace topicpages::xml
