#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace topicpages {

enum class Label { bad, good };

std::string_view to_string(Label label);
std::optional<Label> parse_label(std::string_view name);

struct LabeledExample {
  std::string term;
  std::string sentence;
  Label label = Label::bad;

  friend bool operator==(const LabeledExample&, const LabeledExample&) = default;
};

/// JSON Lines: {"concept": str, "sentence": str, "label": "good"|"bad"}.
std::vector<LabeledExample> load_labeled_jsonl(const std::filesystem::path& path);
void write_labeled_jsonl(const std::vector<LabeledExample>& examples, const std::filesystem::path& path);

inline constexpr std::size_t kWclExpectedSize = 4619;

struct WclLoadReport {
  std::size_t good = 0;
  std::size_t bad = 0;
  std::size_t skipped = 0;  // entries whose term could not be recovered
  std::vector<std::filesystem::path> files;

  std::size_t total() const noexcept { return good + bad; }
};

/// Loads WCL. `path` may be a directory (every *good*.txt / *bad*.txt below
/// it, sorted), a single native file (label from its name) or a JSONL file.
/// A size other than 4,619 is logged as a warning, not an error.
std::vector<LabeledExample> load_wcl(const std::filesystem::path& path, WclLoadReport* report = nullptr);

/// Parses one WCL native file: entries are a '#'-prefixed sentence line in
/// which the token TARGET stands for the term, followed by a line whose text
/// before the first ':' (or tab) is the term. Inline <TAG> markup is dropped.
std::vector<LabeledExample> parse_wcl_native(std::string_view content, Label label, std::size_t* skipped = nullptr);

}  // namespace topicpages
