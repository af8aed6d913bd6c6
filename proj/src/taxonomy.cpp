#include "topicpages/taxonomy.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <set>

#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

#include "topicpages/error.hpp"
#include "topicpages/utf8.hpp"

namespace topicpages {

namespace {

std::string collapse_and_trim(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending = false;
  for (std::size_t i = 0; i < text.size();) {
    const auto d = utf8::decode(text, i);
    if (utf8::is_space(d.codepoint)) {
      pending = !out.empty();
    } else {
      if (pending) out += ' ';
      pending = false;
      out.append(text.substr(i, d.length));
    }
    i += d.length;
  }
  return out;
}

bool is_ascii(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return static_cast<unsigned char>(c) < 0x80; });
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto p = s.find(sep, start);
    out.emplace_back(s.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

}  // namespace

std::string normalize(std::string_view surface) {
  if (is_ascii(surface)) {
    std::string lowered(surface);
    std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return collapse_and_trim(lowered);
  }
  UErrorCode status = U_ZERO_ERROR;
  const auto* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw DataError("ICU NFC normalizer unavailable");
  auto text = icu::UnicodeString::fromUTF8(icu::StringPiece(surface.data(), static_cast<int32_t>(surface.size())));
  text = nfc->normalize(text, status);
  text.foldCase(U_FOLD_CASE_DEFAULT);
  text = nfc->normalize(text, status);
  if (U_FAILURE(status)) throw DataError("Unicode normalization failed");
  std::string out;
  text.toUTF8String(out);
  return collapse_and_trim(out);
}

bool is_case_sensitive_alias(std::string_view alias) {
  const auto trimmed = collapse_and_trim(alias);
  if (trimmed.empty() || utf8::length(trimmed) > 4) return false;
  bool any_letter = false;
  for (std::size_t i = 0; i < trimmed.size();) {
    const auto d = utf8::decode(trimmed, i);
    if (utf8::is_lower(d.codepoint)) return false;
    any_letter = any_letter || utf8::is_letter(d.codepoint);
    i += d.length;
  }
  return any_letter;
}

Taxonomy::Taxonomy(std::vector<Concept> concepts) {
  concepts_.reserve(concepts.size());
  for (auto& c : concepts) {
    if (c.concept_id.empty()) throw DataError("concept with empty concept_id");
    if (by_id_.count(c.concept_id) != 0) throw DataError("duplicate concept_id '" + c.concept_id + "'");
    c.preferred_label = collapse_and_trim(c.preferred_label);
    if (c.preferred_label.empty()) throw DataError("concept '" + c.concept_id + "' has an empty preferred label");
    if (c.domains.empty()) throw DataError("concept '" + c.concept_id + "' has no domains");

    // Preferred label first, then aliases; one entry per normalized form.
    std::vector<std::string> raw;
    raw.push_back(c.preferred_label);
    for (auto& a : c.aliases) raw.push_back(collapse_and_trim(a));
    std::vector<std::string> aliases;
    std::set<std::string> keys;
    for (auto& a : raw) {
      if (a.empty()) throw DataError("concept '" + c.concept_id + "' has an empty alias");
      if (keys.insert(normalize(a)).second) aliases.push_back(std::move(a));
    }
    c.aliases = std::move(aliases);
    by_id_.emplace(c.concept_id, concepts_.size());
    concepts_.push_back(std::move(c));
  }

  for (std::size_t ci = 0; ci < concepts_.size(); ++ci) {
    for (const auto& alias : concepts_[ci].aliases) {
      auto& entries = index_[normalize(alias)];
      const bool sensitive = is_case_sensitive_alias(alias);
      const auto existing = std::find_if(entries.begin(), entries.end(),
                                         [&](const AliasEntry& e) { return e.concept_index == ci; });
      if (existing == entries.end()) {
        entries.push_back({ci, alias, sensitive});
      } else if (!sensitive) {
        existing->case_sensitive = false;
      }
    }
  }
}

const Concept* Taxonomy::find(std::string_view concept_id) const {
  const auto idx = index_of(concept_id);
  return idx ? &concepts_[*idx] : nullptr;
}

std::optional<std::size_t> Taxonomy::index_of(std::string_view concept_id) const {
  const auto it = by_id_.find(concept_id);
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> Taxonomy::lookup(std::string_view normalized_key) const {
  std::vector<std::string> ids;
  if (const auto it = index_.find(normalized_key); it != index_.end()) {
    for (const auto& e : it->second) ids.push_back(concepts_[e.concept_index].concept_id);
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::vector<std::size_t> Taxonomy::match_surface(std::string_view raw_surface) const {
  std::vector<std::size_t> out;
  const auto it = index_.find(normalize(raw_surface));
  if (it == index_.end()) return out;
  for (const auto& e : it->second) {
    if (!e.case_sensitive || collapse_and_trim(raw_surface) == e.surface) out.push_back(e.concept_index);
  }
  std::sort(out.begin(), out.end(),
            [&](std::size_t a, std::size_t b) { return concepts_[a].concept_id < concepts_[b].concept_id; });
  return out;
}

Taxonomy parse_taxonomy(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw DataError("taxonomy file is empty");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  const auto header = split(line, '\t');
  if (header.size() < 4 || header[0] != "concept_id" || header[1] != "preferred_label" || header[2] != "aliases" ||
      header[3] != "domains") {
    throw FormatError("expected header 'concept_id\\tpreferred_label\\taliases\\tdomains'", line_no);
  }

  std::vector<Concept> concepts;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (collapse_and_trim(line).empty()) continue;
    if (!utf8::is_valid(line)) throw FormatError("invalid UTF-8", line_no);
    const auto cols = split(line, '\t');
    if (cols.size() < 4) throw FormatError("expected 4 columns, found " + std::to_string(cols.size()), line_no);
    Concept c;
    c.concept_id = collapse_and_trim(cols[0]);
    c.preferred_label = cols[1];
    if (c.concept_id.empty()) throw FormatError("empty concept_id", line_no);
    if (collapse_and_trim(c.preferred_label).empty()) throw FormatError("empty preferred_label", line_no);
    if (!seen.insert(c.concept_id).second) throw FormatError("duplicate concept_id '" + c.concept_id + "'", line_no);
    if (!collapse_and_trim(cols[2]).empty()) {
      for (auto& a : split(cols[2], '|')) {
        if (collapse_and_trim(a).empty()) throw FormatError("empty alias in list", line_no);
        c.aliases.push_back(std::move(a));
      }
    }
    for (auto& d : split(cols[3], '|')) {
      auto trimmed = collapse_and_trim(d);
      if (trimmed.empty()) throw FormatError("empty domain", line_no);
      if (std::find(c.domains.begin(), c.domains.end(), trimmed) == c.domains.end()) c.domains.push_back(trimmed);
    }
    concepts.push_back(std::move(c));
  }
  return Taxonomy(std::move(concepts));
}

Taxonomy load_taxonomy(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open taxonomy '" + path.string() + "'");
  return parse_taxonomy(in);
}

}  // namespace topicpages
