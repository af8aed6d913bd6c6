#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "topicpages/annotator.hpp"
#include "topicpages/corpus.hpp"

namespace topicpages {

/// One document per line: {doc_id, title, source_kind, domain,
/// snippets: [{heading, text}]}. Sentences and tokens are rebuilt on load.
void write_corpus_jsonl(const Corpus& corpus, std::ostream& out);
void write_corpus_jsonl(const Corpus& corpus, const std::filesystem::path& path);
Corpus read_corpus_jsonl(std::istream& in, const Tagger& tagger = default_tagger());
Corpus read_corpus_jsonl(const std::filesystem::path& path, const Tagger& tagger = default_tagger());

/// One annotation per line with the Annotation fields in declaration order;
/// span is [begin, end).
void write_annotations_jsonl(const std::vector<Annotation>& annotations, std::ostream& out);
void write_annotations_jsonl(const std::vector<Annotation>& annotations, const std::filesystem::path& path);
std::vector<Annotation> read_annotations_jsonl(std::istream& in);
std::vector<Annotation> read_annotations_jsonl(const std::filesystem::path& path);

}  // namespace topicpages
