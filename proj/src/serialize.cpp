#include "topicpages/serialize.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "topicpages/error.hpp"

namespace topicpages {

using ojson = nlohmann::ordered_json;
using nlohmann::json;

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return in;
}

template <class F>
void for_each_json_line(std::istream& in, F&& f) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      f(json::parse(line));
    } catch (const json::exception& e) {
      throw FormatError(e.what(), line_no);
    } catch (const DataError& e) {
      throw FormatError(e.what(), line_no);
    }
  }
}

}  // namespace

void write_corpus_jsonl(const Corpus& corpus, std::ostream& out) {
  for (const auto& doc : corpus.documents()) {
    ojson j;
    j["doc_id"] = doc.doc_id;
    j["title"] = doc.title;
    j["source_kind"] = to_string(doc.source_kind);
    j["domain"] = doc.domain;
    auto& snippets = j["snippets"] = ojson::array();
    for (const auto& s : doc.snippets) {
      ojson sj;
      sj["heading"] = s.heading ? ojson(*s.heading) : ojson(nullptr);
      sj["text"] = s.text;
      snippets.push_back(std::move(sj));
    }
    out << j.dump() << '\n';
  }
}

void write_corpus_jsonl(const Corpus& corpus, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_corpus_jsonl(corpus, out);
}

Corpus read_corpus_jsonl(std::istream& in, const Tagger& tagger) {
  Corpus corpus;
  for_each_json_line(in, [&](const json& j) {
    Document doc;
    doc.doc_id = j.at("doc_id").get<std::string>();
    if (doc.doc_id.empty()) throw DataError("empty doc_id");
    doc.title = j.at("title").get<std::string>();
    const auto kind = parse_source_kind(j.at("source_kind").get<std::string>());
    if (!kind) throw DataError("unknown source_kind");
    doc.source_kind = *kind;
    doc.domain = j.at("domain").get<std::string>();
    std::size_t index = 0;
    for (const auto& sj : j.at("snippets")) {
      std::optional<std::string> heading;
      if (!sj.at("heading").is_null()) heading = sj["heading"].get<std::string>();
      doc.snippets.push_back(build_snippet(doc.doc_id, index++, std::move(heading), sj.at("text").get<std::string>(),
                                           tagger));
    }
    corpus.add(std::move(doc));
  });
  return corpus;
}

Corpus read_corpus_jsonl(const std::filesystem::path& path, const Tagger& tagger) {
  auto in = open_in(path);
  return read_corpus_jsonl(in, tagger);
}

void write_annotations_jsonl(const std::vector<Annotation>& annotations, std::ostream& out) {
  for (const auto& a : annotations) {
    ojson j;
    j["concept_id"] = a.concept_id;
    j["doc_id"] = a.doc_id;
    j["snippet_index"] = a.snippet_index;
    j["sentence_index"] = a.sentence_index;
    j["span"] = {a.span.begin, a.span.end};
    j["surface"] = a.surface;
    j["via_abbreviation"] = a.via_abbreviation;
    out << j.dump() << '\n';
  }
}

void write_annotations_jsonl(const std::vector<Annotation>& annotations, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_annotations_jsonl(annotations, out);
}

std::vector<Annotation> read_annotations_jsonl(std::istream& in) {
  std::vector<Annotation> out;
  for_each_json_line(in, [&](const json& j) {
    Annotation a;
    a.concept_id = j.at("concept_id").get<std::string>();
    a.doc_id = j.at("doc_id").get<std::string>();
    a.snippet_index = j.at("snippet_index").get<std::size_t>();
    a.sentence_index = j.at("sentence_index").get<std::size_t>();
    const auto& span = j.at("span");
    if (!span.is_array() || span.size() != 2) throw DataError("span must be [begin, end]");
    a.span = {span[0].get<std::size_t>(), span[1].get<std::size_t>()};
    if (a.span.end < a.span.begin) throw DataError("span end before begin");
    a.surface = j.at("surface").get<std::string>();
    a.via_abbreviation = j.at("via_abbreviation").get<bool>();
    out.push_back(std::move(a));
  });
  return out;
}

std::vector<Annotation> read_annotations_jsonl(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_annotations_jsonl(in);
}

}  // namespace topicpages
