#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "topicpages/annotator.hpp"
#include "topicpages/corpus.hpp"
#include "topicpages/defrank.hpp"
#include "topicpages/related.hpp"
#include "topicpages/snippetrank.hpp"
#include "topicpages/taxonomy.hpp"

namespace topicpages {

inline constexpr std::string_view kPipelineVersion = "topicpages-0.1.0";

struct PageConfig {
  std::size_t snippets_k = kDefaultSnippetsK;
  std::size_t related_k = kDefaultRelatedK;
  double definition_threshold = kDefaultDefinitionThreshold;
  std::string scorer = "baseline";  // baseline | bridge
  std::string scorer_endpoint;
  std::vector<std::string> domains;  // empty: every domain

  /// Applies one key=value setting; throws UsageError for unknown keys or
  /// bad values.
  void set(std::string_view key, std::string_view value);
};

/// Flat key=value lines; '#' starts a comment. Errors carry the line number.
PageConfig parse_config(std::istream& in, PageConfig base = {});
PageConfig load_config(const std::filesystem::path& path, PageConfig base = {});

struct PageDefinition {
  std::string sentence;
  double score = 0.0;
  Provenance provenance;

  friend bool operator==(const PageDefinition&, const PageDefinition&) = default;
};

struct PageSnippet {
  std::string text;
  double score = 0.0;
  SnippetRef provenance;

  friend bool operator==(const PageSnippet&, const PageSnippet&) = default;
};

struct TopicPage {
  std::string concept_id;
  std::string preferred_label;
  std::string domain;
  std::optional<PageDefinition> definition;
  std::vector<PageSnippet> snippets;
  std::vector<RelatedConcept> related;
  std::string generated_at;
  std::string pipeline_version{kPipelineVersion};

  friend bool operator==(const TopicPage&, const TopicPage&) = default;
};

/// ISO-8601 UTC, second precision.
std::string format_timestamp(long long epoch_seconds);

class PageBuilder {
 public:
  /// `fallback` takes over when `scorer` raises a ProtocolError; it may be
  /// null, in which case the error propagates.
  PageBuilder(const Corpus& corpus, const Taxonomy& taxonomy, std::vector<Annotation> annotations, PageConfig config,
              DefinitionScorer& scorer, DefinitionScorer* fallback, std::string generated_at);

  /// Nothing when the concept has no annotation in `domain`. Throws
  /// DataError for an unknown concept.
  std::optional<TopicPage> build_page(std::string_view concept_id, std::string_view domain);

  /// Domains of the concept that hold annotations of it, sorted.
  std::vector<std::string> page_domains(std::string_view concept_id) const;

  /// Every (concept, domain) page, ordered by concept_id then domain.
  std::vector<TopicPage> build_all();

  std::size_t fallback_count() const noexcept { return fallbacks_; }

 private:
  std::vector<Annotation> domain_annotations(std::string_view domain) const;

  const Corpus* corpus_;
  const Taxonomy* taxonomy_;
  std::vector<Annotation> annotations_;
  PageConfig config_;
  DefinitionScorer* scorer_;
  DefinitionScorer* fallback_;
  std::string generated_at_;
  std::size_t fallbacks_ = 0;
};

std::string page_to_json(const TopicPage& page);
TopicPage page_from_json(std::string_view line);

void write_pages(std::span<const TopicPage> pages, std::ostream& out);
void write_pages(std::span<const TopicPage> pages, const std::filesystem::path& path);
std::vector<TopicPage> read_pages(std::istream& in);
std::vector<TopicPage> read_pages(const std::filesystem::path& path);

std::string html_escape(std::string_view text);
std::string domain_slug(std::string_view domain);
/// "<concept_id>__<domain-slug>.html"
std::string page_file_name(std::string_view concept_id, std::string_view domain);

inline constexpr std::string_view kNoDefinitionMarker = "No definition available.";

/// Sibling pages used to resolve related-term links and labels.
struct SiteIndex {
  std::map<std::pair<std::string, std::string>, std::string> labels;  // (concept, domain) -> label

  static SiteIndex from_pages(std::span<const TopicPage> pages);
};

std::string render_html(const TopicPage& page, const SiteIndex& site = {});

/// Writes one HTML file per page plus index.html; returns the files written.
std::vector<std::filesystem::path> render_site(std::span<const TopicPage> pages, const std::filesystem::path& dir);

}  // namespace topicpages
