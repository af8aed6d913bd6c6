#include "topicpages/pagegen.hpp"

#include <algorithm>
#include <cerrno>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "topicpages/error.hpp"

namespace topicpages {

using ojson = nlohmann::ordered_json;
using nlohmann::json;

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::size_t parse_count(std::string_view key, std::string_view value) {
  std::size_t v = 0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, v);
  if (ec != std::errc() || ptr != end || v == 0) {
    throw UsageError(std::string(key) + " must be a positive integer, got '" + std::string(value) + "'");
  }
  return v;
}

double parse_unit(std::string_view key, std::string_view value) {
  const std::string s(value);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno != 0 || !(v >= 0.0 && v <= 1.0)) {
    throw UsageError(std::string(key) + " must be a number in [0, 1], got '" + s + "'");
  }
  return v;
}

}  // namespace

void PageConfig::set(std::string_view key, std::string_view raw) {
  const auto value = trim(raw);
  if (key == "snippets_k") {
    snippets_k = parse_count(key, value);
  } else if (key == "related_k") {
    related_k = parse_count(key, value);
  } else if (key == "definition_threshold") {
    definition_threshold = parse_unit(key, value);
  } else if (key == "scorer") {
    if (value != "baseline" && value != "bridge") throw UsageError("scorer must be baseline or bridge");
    scorer = value;
  } else if (key == "scorer_endpoint") {
    scorer_endpoint = value;
  } else if (key == "domains") {
    domains.clear();
    std::size_t pos = 0;
    while (pos <= value.size()) {
      auto comma = value.find(',', pos);
      if (comma == std::string::npos) comma = value.size();
      auto d = trim(std::string_view(value).substr(pos, comma - pos));
      if (!d.empty()) domains.push_back(std::move(d));
      pos = comma + 1;
    }
  } else {
    throw UsageError("unknown config key '" + std::string(key) + "'");
  }
}

PageConfig parse_config(std::istream& in, PageConfig base) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    const auto body = trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw FormatError("expected key=value", line_no);
    try {
      base.set(trim(std::string_view(body).substr(0, eq)), std::string_view(body).substr(eq + 1));
    } catch (const UsageError& e) {
      throw FormatError(e.what(), line_no);
    }
  }
  return base;
}

PageConfig load_config(const std::filesystem::path& path, PageConfig base) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config '" + path.string() + "'");
  return parse_config(in, std::move(base));
}

std::string format_timestamp(long long epoch_seconds) {
  const auto t = static_cast<std::time_t>(epoch_seconds);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// ---------------------------------------------------------------------------

PageBuilder::PageBuilder(const Corpus& corpus, const Taxonomy& taxonomy, std::vector<Annotation> annotations,
                         PageConfig config, DefinitionScorer& scorer, DefinitionScorer* fallback,
                         std::string generated_at)
    : corpus_(&corpus),
      taxonomy_(&taxonomy),
      annotations_(std::move(annotations)),
      config_(std::move(config)),
      scorer_(&scorer),
      fallback_(fallback),
      generated_at_(std::move(generated_at)) {}

std::vector<Annotation> PageBuilder::domain_annotations(std::string_view domain) const {
  std::vector<Annotation> out;
  for (const auto& a : annotations_) {
    const Document* doc = corpus_->find(a.doc_id);
    if (doc != nullptr && doc->domain == domain) out.push_back(a);
  }
  return out;
}

std::vector<std::string> PageBuilder::page_domains(std::string_view concept_id) const {
  const Concept* concept_entry = taxonomy_->find(concept_id);
  if (concept_entry == nullptr) throw DataError("unknown concept '" + std::string(concept_id) + "'");
  std::set<std::string> found;
  for (const auto& a : annotations_) {
    if (a.concept_id != concept_id) continue;
    const Document* doc = corpus_->find(a.doc_id);
    if (doc != nullptr) found.insert(doc->domain);
  }
  std::vector<std::string> out;
  for (const auto& d : found) {
    const auto& own = concept_entry->domains;
    if (!own.empty() && std::find(own.begin(), own.end(), d) == own.end()) continue;
    if (!config_.domains.empty() &&
        std::find(config_.domains.begin(), config_.domains.end(), d) == config_.domains.end()) {
      continue;
    }
    out.push_back(d);
  }
  return out;
}

std::optional<TopicPage> PageBuilder::build_page(std::string_view concept_id, std::string_view domain) {
  const Concept* concept_entry = taxonomy_->find(concept_id);
  if (concept_entry == nullptr) throw DataError("unknown concept '" + std::string(concept_id) + "'");
  const auto annotations = domain_annotations(domain);
  std::set<SnippetRef> mentioned;
  for (const auto& a : annotations) {
    if (a.concept_id == concept_id) mentioned.insert({a.doc_id, a.snippet_index});
  }
  if (mentioned.empty()) return std::nullopt;

  TopicPage page;
  page.concept_id = std::string(concept_id);
  page.preferred_label = concept_entry->preferred_label;
  page.domain = std::string(domain);
  page.generated_at = generated_at_;

  const auto candidates = extract_candidates(concept_id, annotations, *corpus_, domain, *taxonomy_);
  std::vector<ScoredCandidate> scored;
  try {
    scored = score_candidates(candidates, *scorer_);
  } catch (const ProtocolError& e) {
    if (fallback_ == nullptr) throw;
    ++fallbacks_;
    spdlog::warn("scorer '{}' failed for {} ({}): {}; falling back to {}", scorer_->name(), concept_id, domain,
                 e.what(), fallback_->name());
    scored = score_candidates(candidates, *fallback_);
  }
  if (const auto best = select_definition(scored, config_.definition_threshold)) {
    page.definition = PageDefinition{best->candidate.sentence, best->score, best->candidate.provenance};
  }

  std::vector<SnippetScore> snippet_scores;
  for (const auto& ref : mentioned) {
    const Snippet* snippet = corpus_->find_snippet(ref.doc_id, ref.snippet_index);
    if (snippet == nullptr) throw DataError("annotation refers to a missing snippet in '" + ref.doc_id + "'");
    snippet_scores.push_back(score_snippet(concept_id, *snippet, annotations));
  }
  for (const auto& s : rank_snippets(std::move(snippet_scores), config_.snippets_k)) {
    page.snippets.push_back({corpus_->find_snippet(s.ref.doc_id, s.ref.snippet_index)->text, s.score, s.ref});
  }

  page.related = top_related(cooccurrence_counts(concept_id, group_by_snippet(annotations)), config_.related_k);
  return page;
}

std::vector<TopicPage> PageBuilder::build_all() {
  std::vector<std::string> ids;
  for (const auto& c : taxonomy_->concepts()) ids.push_back(c.concept_id);
  std::sort(ids.begin(), ids.end());
  std::vector<TopicPage> pages;
  for (const auto& id : ids) {
    for (const auto& domain : page_domains(id)) {
      if (auto page = build_page(id, domain)) pages.push_back(std::move(*page));
    }
  }
  return pages;
}

// ---------------------------------------------------------------------------

std::string page_to_json(const TopicPage& page) {
  ojson j;
  j["concept_id"] = page.concept_id;
  j["preferred_label"] = page.preferred_label;
  j["domain"] = page.domain;
  if (page.definition) {
    ojson d;
    d["sentence"] = page.definition->sentence;
    d["score"] = page.definition->score;
    ojson p;
    p["doc_id"] = page.definition->provenance.doc_id;
    p["snippet_index"] = page.definition->provenance.snippet_index;
    p["sentence_index"] = page.definition->provenance.sentence_index;
    d["provenance"] = std::move(p);
    j["definition"] = std::move(d);
  } else {
    j["definition"] = nullptr;
  }
  auto& snippets = j["snippets"] = ojson::array();
  for (const auto& s : page.snippets) {
    ojson sj;
    sj["text"] = s.text;
    sj["score"] = s.score;
    ojson p;
    p["doc_id"] = s.provenance.doc_id;
    p["snippet_index"] = s.provenance.snippet_index;
    sj["provenance"] = std::move(p);
    snippets.push_back(std::move(sj));
  }
  auto& related = j["related"] = ojson::array();
  for (const auto& r : page.related) {
    ojson rj;
    rj["concept_id"] = r.concept_id;
    rj["count"] = r.count;
    related.push_back(std::move(rj));
  }
  j["generated_at"] = page.generated_at;
  j["pipeline_version"] = page.pipeline_version;
  return j.dump();
}

TopicPage page_from_json(std::string_view line) {
  const auto j = json::parse(line);
  TopicPage page;
  page.concept_id = j.at("concept_id").get<std::string>();
  page.preferred_label = j.at("preferred_label").get<std::string>();
  page.domain = j.at("domain").get<std::string>();
  if (const auto& d = j.at("definition"); !d.is_null()) {
    const auto& p = d.at("provenance");
    page.definition = PageDefinition{
        d.at("sentence").get<std::string>(), d.at("score").get<double>(),
        Provenance{p.at("doc_id").get<std::string>(), p.at("snippet_index").get<std::size_t>(),
                   p.at("sentence_index").get<std::size_t>()}};
  }
  for (const auto& s : j.at("snippets")) {
    const auto& p = s.at("provenance");
    page.snippets.push_back({s.at("text").get<std::string>(), s.at("score").get<double>(),
                             SnippetRef{p.at("doc_id").get<std::string>(), p.at("snippet_index").get<std::size_t>()}});
  }
  for (const auto& r : j.at("related")) {
    page.related.push_back({r.at("concept_id").get<std::string>(), r.at("count").get<std::size_t>()});
  }
  page.generated_at = j.at("generated_at").get<std::string>();
  page.pipeline_version = j.at("pipeline_version").get<std::string>();
  return page;
}

void write_pages(std::span<const TopicPage> pages, std::ostream& out) {
  for (const auto& p : pages) out << page_to_json(p) << '\n';
}

void write_pages(std::span<const TopicPage> pages, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  write_pages(pages, out);
  out.flush();
  if (!out) throw DataError("write to '" + path.string() + "' failed");
}

std::vector<TopicPage> read_pages(std::istream& in) {
  std::vector<TopicPage> pages;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      pages.push_back(page_from_json(line));
    } catch (const json::exception& e) {
      throw FormatError(e.what(), line_no);
    }
  }
  return pages;
}

std::vector<TopicPage> read_pages(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return read_pages(in);
}

// ---------------------------------------------------------------------------

std::string html_escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (const char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&#39;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string domain_slug(std::string_view domain) {
  std::string out;
  for (const char c : domain) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u) != 0) {
      out += static_cast<char>(std::tolower(u));
    } else if (!out.empty() && out.back() != '-') {
      out += '-';
    }
  }
  while (!out.empty() && out.back() == '-') out.pop_back();
  return out.empty() ? "general" : out;
}

std::string page_file_name(std::string_view concept_id, std::string_view domain) {
  return std::string(concept_id) + "__" + domain_slug(domain) + ".html";
}

SiteIndex SiteIndex::from_pages(std::span<const TopicPage> pages) {
  SiteIndex site;
  for (const auto& p : pages) site.labels[{p.concept_id, p.domain}] = p.preferred_label;
  return site;
}

namespace {

std::string provenance_id(const std::string& doc_id, std::size_t snippet) {
  return "urn:topicpages:" + doc_id + ":" + std::to_string(snippet);
}

std::string format_score(double score) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", score);
  return buf;
}

}  // namespace

std::string render_html(const TopicPage& page, const SiteIndex& site) {
  std::ostringstream h;
  const auto label = html_escape(page.preferred_label);
  h << "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n"
    << "<title>" << label << " (" << html_escape(page.domain) << ")</title>\n"
    << "</head>\n<body>\n<article class=\"topic-page\" data-concept=\"" << html_escape(page.concept_id) << "\">\n"
    << "<h1>" << label << "</h1>\n"
    << "<p class=\"domain\">" << html_escape(page.domain) << "</p>\n";

  h << "<section id=\"definition\">\n<h2>Definition</h2>\n";
  if (page.definition) {
    const auto& d = *page.definition;
    h << "<blockquote class=\"definition\">" << html_escape(d.sentence) << "</blockquote>\n"
      << "<p class=\"provenance\"><a href=\"" << html_escape(provenance_id(d.provenance.doc_id, d.provenance.snippet_index))
      << "\">" << html_escape(d.provenance.doc_id) << ", section " << d.provenance.snippet_index << ", sentence "
      << d.provenance.sentence_index << "</a> (score " << format_score(d.score) << ")</p>\n";
  } else {
    h << "<p class=\"no-definition\">" << kNoDefinitionMarker << "</p>\n";
  }
  h << "</section>\n";

  h << "<section id=\"related\">\n<h2>Related Terms</h2>\n";
  if (page.related.empty()) {
    h << "<p class=\"none\">None.</p>\n";
  } else {
    h << "<ul>\n";
    for (const auto& r : page.related) {
      const auto it = site.labels.find({r.concept_id, page.domain});
      const auto text = html_escape(it != site.labels.end() ? it->second : r.concept_id);
      h << "<li>";
      if (it != site.labels.end()) {
        h << "<a href=\"" << html_escape(page_file_name(r.concept_id, page.domain)) << "\">" << text << "</a>";
      } else {
        h << text;
      }
      h << " <span class=\"count\">(" << r.count << ")</span></li>\n";
    }
    h << "</ul>\n";
  }
  h << "</section>\n";

  h << "<section id=\"snippets\">\n<h2>Snippets</h2>\n";
  if (page.snippets.empty()) {
    h << "<p class=\"none\">None.</p>\n";
  } else {
    h << "<ol>\n";
    for (const auto& s : page.snippets) {
      h << "<li class=\"snippet\">\n<blockquote>" << html_escape(s.text) << "</blockquote>\n"
        << "<p class=\"provenance\"><a href=\"" << html_escape(provenance_id(s.provenance.doc_id, s.provenance.snippet_index))
        << "\">" << html_escape(s.provenance.doc_id) << ", section " << s.provenance.snippet_index << "</a> (score "
        << format_score(s.score) << ")</p>\n</li>\n";
    }
    h << "</ol>\n";
  }
  h << "</section>\n";

  h << "<footer>" << html_escape(page.pipeline_version) << ", generated " << html_escape(page.generated_at)
    << "</footer>\n</article>\n</body>\n</html>\n";
  return h.str();
}

std::vector<std::filesystem::path> render_site(std::span<const TopicPage> pages, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DataError("cannot create '" + dir.string() + "': " + ec.message());
  const auto site = SiteIndex::from_pages(pages);
  std::vector<std::filesystem::path> written;
  auto emit = [&](const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << content;
    written.push_back(path);
  };
  std::ostringstream index;
  index << "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n<title>Topic pages</title>\n"
        << "</head>\n<body>\n<h1>Topic pages</h1>\n<ul>\n";
  for (const auto& page : pages) {
    const auto name = page_file_name(page.concept_id, page.domain);
    emit(dir / name, render_html(page, site));
    index << "<li><a href=\"" << html_escape(name) << "\">" << html_escape(page.preferred_label) << "</a> ("
          << html_escape(page.domain) << ")</li>\n";
  }
  index << "</ul>\n</body>\n</html>\n";
  emit(dir / "index.html", index.str());
  return written;
}

}  // namespace topicpages
