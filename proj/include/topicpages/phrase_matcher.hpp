#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace topicpages {

/// Aho-Corasick automaton over token sequences. Patterns and inputs are
/// sequences of already-normalized token strings, so every match starts and
/// ends on a token boundary.
class PhraseMatcher {
 public:
  using PatternId = std::size_t;

  struct Match {
    std::size_t first_token;
    std::size_t end_token;  // exclusive
    PatternId pattern;
  };

  /// Adds a pattern; identical token sequences share one id. Invalidates a
  /// previous build().
  PatternId add(std::span<const std::string> tokens);
  void build();

  std::size_t pattern_count() const noexcept { return pattern_lengths_.size(); }

  /// Every occurrence of every pattern, ordered by end token then length.
  std::vector<Match> find_all(std::span<const std::string> tokens) const;

 private:
  static constexpr std::uint32_t kNoSymbol = UINT32_MAX;

  struct Node {
    std::unordered_map<std::uint32_t, std::uint32_t> next;
    std::uint32_t fail = 0;
    std::uint32_t output_link = 0;  // nearest proper suffix node that ends a pattern; 0 = none
    std::vector<PatternId> patterns;
  };

  std::uint32_t symbol(const std::string& token) const;

  std::unordered_map<std::string, std::uint32_t> symbols_;
  std::vector<Node> nodes_{Node{}};
  std::vector<std::size_t> pattern_lengths_;
  std::vector<std::uint32_t> pattern_nodes_;
  bool built_ = false;
};

}  // namespace topicpages
