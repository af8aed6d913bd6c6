#include "topicpages/phrase_matcher.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace topicpages {

std::uint32_t PhraseMatcher::symbol(const std::string& token) const {
  const auto it = symbols_.find(token);
  return it == symbols_.end() ? kNoSymbol : it->second;
}

PhraseMatcher::PatternId PhraseMatcher::add(std::span<const std::string> tokens) {
  if (tokens.empty()) throw std::invalid_argument("empty pattern");
  built_ = false;
  std::uint32_t node = 0;
  for (const auto& t : tokens) {
    const auto [sym_it, _] = symbols_.try_emplace(t, static_cast<std::uint32_t>(symbols_.size()));
    const auto sym = sym_it->second;
    const auto next = nodes_[node].next.find(sym);
    if (next != nodes_[node].next.end()) {
      node = next->second;
    } else {
      const auto created = static_cast<std::uint32_t>(nodes_.size());
      nodes_[node].next.emplace(sym, created);
      nodes_.emplace_back();
      node = created;
    }
  }
  if (!nodes_[node].patterns.empty()) return nodes_[node].patterns.front();
  const auto id = pattern_lengths_.size();
  pattern_lengths_.push_back(tokens.size());
  pattern_nodes_.push_back(node);
  nodes_[node].patterns.push_back(id);
  return id;
}

void PhraseMatcher::build() {
  std::deque<std::uint32_t> queue;
  for (const auto& [sym, child] : nodes_[0].next) {
    nodes_[child].fail = 0;
    nodes_[child].output_link = 0;
    queue.push_back(child);
  }
  while (!queue.empty()) {
    const auto node = queue.front();
    queue.pop_front();
    for (const auto& [sym, child] : nodes_[node].next) {
      auto f = nodes_[node].fail;
      while (f != 0 && nodes_[f].next.count(sym) == 0) f = nodes_[f].fail;
      const auto it = nodes_[f].next.find(sym);
      const auto fail = (it != nodes_[f].next.end() && it->second != child) ? it->second : 0;
      nodes_[child].fail = fail;
      nodes_[child].output_link = !nodes_[fail].patterns.empty() ? fail : nodes_[fail].output_link;
      queue.push_back(child);
    }
  }
  built_ = true;
}

std::vector<PhraseMatcher::Match> PhraseMatcher::find_all(std::span<const std::string> tokens) const {
  if (!built_) throw std::logic_error("PhraseMatcher::find_all before build()");
  std::vector<Match> out;
  std::uint32_t state = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto sym = symbol(tokens[i]);
    if (sym == kNoSymbol) {
      state = 0;
      continue;
    }
    while (state != 0 && nodes_[state].next.count(sym) == 0) state = nodes_[state].fail;
    const auto it = nodes_[state].next.find(sym);
    state = it == nodes_[state].next.end() ? 0 : it->second;

    const auto emit = [&](std::uint32_t node) {
      for (const auto id : nodes_[node].patterns) out.push_back({i + 1 - pattern_lengths_[id], i + 1, id});
    };
    emit(state);
    for (auto link = nodes_[state].output_link; link != 0; link = nodes_[link].output_link) emit(link);
  }
  return out;
}

}  // namespace topicpages
