#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace topicpages {

/// NFC, case fold, collapse internal whitespace runs to one space, trim.
/// Idempotent.
std::string normalize(std::string_view surface);

/// Aliases of at most four characters written entirely in uppercase ("ML",
/// "PCR") only match their exact surface form.
bool is_case_sensitive_alias(std::string_view alias);

struct Concept {
  std::string concept_id;
  std::string preferred_label;
  std::vector<std::string> aliases;  // distinct by normalized form; preferred label first
  std::vector<std::string> domains;

  friend bool operator==(const Concept&, const Concept&) = default;
};

struct AliasEntry {
  std::size_t concept_index;
  std::string surface;  // first raw spelling seen for this (key, concept)
  bool case_sensitive;

  friend bool operator==(const AliasEntry&, const AliasEntry&) = default;
};

/// Immutable concept inventory with an index from normalized alias to the
/// concepts carrying it. Safe to share between threads after construction.
class Taxonomy {
 public:
  using SurfaceIndex = std::map<std::string, std::vector<AliasEntry>, std::less<>>;

  Taxonomy() = default;
  /// Validates the concepts (unique ids, non-empty aliases and domains) and
  /// builds the surface index. Throws DataError.
  explicit Taxonomy(std::vector<Concept> concepts);

  const std::vector<Concept>& concepts() const noexcept { return concepts_; }
  std::size_t size() const noexcept { return concepts_.size(); }
  const Concept* find(std::string_view concept_id) const;
  std::optional<std::size_t> index_of(std::string_view concept_id) const;

  const SurfaceIndex& surface_index() const noexcept { return index_; }

  /// Concept ids whose aliases normalize to `normalized_key`, ignoring case
  /// sensitivity. Sorted ascending.
  std::vector<std::string> lookup(std::string_view normalized_key) const;

  /// Concept indices that a raw text surface refers to, honoring the
  /// case-sensitive rule for short uppercase aliases. Sorted ascending.
  std::vector<std::size_t> match_surface(std::string_view raw_surface) const;

 private:
  std::vector<Concept> concepts_;
  std::map<std::string, std::size_t, std::less<>> by_id_;
  SurfaceIndex index_;
};

/// Reads the TSV format: header `concept_id preferred_label aliases domains`,
/// `|`-separated lists. Throws FormatError (with line) or DataError.
Taxonomy parse_taxonomy(std::istream& in);
Taxonomy load_taxonomy(const std::filesystem::path& path);

}  // namespace topicpages
