#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace topicpages::utf8 {

struct Decoded {
  char32_t codepoint;
  std::size_t length;  // bytes consumed, >= 1
};

// Invalid sequences decode as U+FFFD consuming one byte.
Decoded decode(std::string_view text, std::size_t pos);

bool is_valid(std::string_view text);

void append(std::string& out, char32_t cp);

// Letters and digits in the tokenizer's sense. Any non-ASCII codepoint outside
// the common punctuation/symbol blocks counts as a word character.
bool is_word_char(char32_t cp);
bool is_letter(char32_t cp);
bool is_upper(char32_t cp);
bool is_lower(char32_t cp);
bool is_space(char32_t cp);

std::size_t length(std::string_view text);

}  // namespace topicpages::utf8
