#include <doctest.h>

#include <nlohmann/json.hpp>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "test_support.hpp"
#include "topicpages/annotator.hpp"
#include "topicpages/error.hpp"

using namespace topicpages;

namespace {

Taxonomy make_taxonomy(std::vector<std::pair<std::string, std::vector<std::string>>> rows) {
  std::vector<Concept> concepts;
  for (auto& [id, aliases] : rows) {
    Concept c;
    c.concept_id = id;
    c.preferred_label = aliases.front();
    c.aliases = aliases;
    c.domains = {"D"};
    concepts.push_back(std::move(c));
  }
  return Taxonomy(std::move(concepts));
}

Document plain(const std::string& text, const std::string& id = "doc") {
  ParseOptions opts;
  opts.doc_id = id;
  return parse_document(text, InputFormat::plain, opts);
}

std::vector<std::pair<std::string, std::string>> pairs_of(const std::string& sentence) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& p : detect_abbreviations(sentence)) out.emplace_back(p.short_form, p.long_form);
  return out;
}

}  // namespace

TEST_CASE("abbreviation examples") {
  CHECK(pairs_of("Machine Learning (ML) is popular.") ==
        std::vector<std::pair<std::string, std::string>>{{"ML", "Machine Learning"}});
  CHECK(pairs_of("The result (see Fig. 2) holds.").empty());
  CHECK(pairs_of("alpha beta gamma (abg)") ==
        std::vector<std::pair<std::string, std::string>>{{"abg", "alpha beta gamma"}});
  CHECK(pairs_of("").empty());

  const std::string s = "We used Machine Learning (ML) here.";
  const auto p = detect_abbreviations(s, 100);
  REQUIRE(p.size() == 1);
  CHECK(p[0].short_span == Span{126, 128});
  CHECK(p[0].definition_span == Span{125, 129});
  CHECK(p[0].long_span == Span{108, 124});
}

TEST_CASE("abbreviation gold fixture, 25 hand-labeled sentences") {
  std::istringstream in(testing::read_file(testing::fixture_path("abbreviations_gold.jsonl")));
  std::string line;
  std::size_t cases = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    const auto text = j.at("text").get<std::string>();
    std::vector<std::pair<std::string, std::string>> expected;
    for (const auto& p : j.at("pairs")) expected.emplace_back(p.at(0).get<std::string>(), p.at(1).get<std::string>());
    CHECK_MESSAGE(pairs_of(text) == expected, text);
    for (const auto& p : detect_abbreviations(text)) {
      CHECK(text.substr(p.short_span.begin, p.short_span.size()) == p.short_form);
      CHECK(text.substr(p.long_span.begin, p.long_span.size()) == p.long_form);
      CHECK(text[p.definition_span.begin] == '(');
      CHECK(text[p.definition_span.end - 1] == ')');
    }
    ++cases;
  }
  CHECK(cases == 25);
}

TEST_CASE("property: long form boundary matches the suffix-scan oracle") {
  std::mt19937_64 rng(3);
  const std::vector<std::string> words{"alpha", "beta", "gamma", "delta", "machine", "learning", "data",
                                       "mining", "of",   "the",  "bag",   "x",       "analysis"};
  std::size_t detected = 0;
  for (int trial = 0; trial < 3000; ++trial) {
    std::string window;
    const auto n = 1 + rng() % 7;
    std::vector<std::string> ws;
    for (std::size_t i = 0; i < n; ++i) {
      ws.push_back(words[rng() % words.size()]);
      window += (i ? " " : "") + ws.back();
    }
    std::string sf;
    if (rng() % 2 == 0) {
      for (std::size_t i = rng() % n; i < n; ++i) sf += static_cast<char>(std::toupper(ws[i][0]));
      if (rng() % 3 == 0) sf += ws.back()[1];
    } else {
      const auto len = 2 + rng() % 4;
      for (std::size_t i = 0; i < len; ++i) sf += static_cast<char>('A' + rng() % 26);
    }
    const auto sentence = "Then " + window + " (" + sf + ") works.";
    const auto got = detect_abbreviations(sentence);
    const auto oracle = testing::suffix_scan_long_form(sf, "Then " + window);

    std::size_t sf_alnum = 0;
    for (const char c : sf) sf_alnum += std::isalnum(static_cast<unsigned char>(c)) ? 1 : 0;
    bool passes = sf.size() >= 2 && sf.size() <= 10 && oracle.has_value();
    if (passes) {
      std::size_t lw = 0;
      bool in_word = false;
      for (const char c : *oracle) {
        const bool delim = c == ' ' || c == '-';
        if (!delim && !in_word) ++lw;
        in_word = !delim;
      }
      passes = oracle->size() >= sf.size() && oracle->find(sf + " ") == std::string::npos &&
               !oracle->ends_with(sf) && lw <= 2 * sf_alnum && lw <= sf_alnum + 5;
    }
    if (passes) {
      REQUIRE_MESSAGE(got.size() == 1, sentence);
      CHECK_MESSAGE(got[0].long_form == *oracle, sentence);
      ++detected;
    } else {
      CHECK_MESSAGE(got.empty(), sentence);
    }
  }
  MESSAGE("pairs detected " << detected << "/3000");
  CHECK(detected > 300);
}

TEST_CASE("annotator examples") {
  SUBCASE("longest match wins") {
    const auto tax = make_taxonomy({{"c1", {"support vector machine"}}, {"c2", {"vector machine"}}});
    const auto a = annotate_document(plain("a support vector machine works"), tax);
    REQUIRE(a.size() == 1);
    CHECK(a[0].concept_id == "c1");
    CHECK(a[0].surface == "support vector machine");
  }
  SUBCASE("no taxonomy term") {
    const auto tax = make_taxonomy({{"c1", {"support vector machine"}}});
    CHECK(annotate_document(plain("nothing relevant is said here."), tax).empty());
  }
  SUBCASE("abbreviation becomes a document-local alias") {
    const auto tax = make_taxonomy({{"c1", {"machine learning"}}});
    const auto a = annotate_document(plain("Machine Learning (ML) is used. ML helps."), tax);
    REQUIRE(a.size() == 2);
    CHECK(a[0].concept_id == "c1");
    CHECK(a[0].surface == "Machine Learning");
    CHECK_FALSE(a[0].via_abbreviation);
    CHECK(a[1].concept_id == "c1");
    CHECK(a[1].surface == "ML");
    CHECK(a[1].via_abbreviation);
    CHECK(a[1].sentence_index == 1);
    // The local alias does not leak into other documents.
    CHECK(annotate_document(plain("ML helps."), tax).empty());
  }
  SUBCASE("same span: preferred label wins, else lowest id") {
    const auto tax = make_taxonomy({{"c1", {"mean", "average"}}, {"c2", {"average"}}, {"c3", {"norm", "mean"}}});
    const auto a = annotate_document(plain("The average and the mean."), tax);
    REQUIRE(a.size() == 2);
    CHECK(a[0].concept_id == "c2");
    CHECK(a[1].concept_id == "c1");
  }
  SUBCASE("case-sensitive short aliases") {
    const auto tax = make_taxonomy({{"c1", {"polymerase chain reaction", "PCR"}}});
    CHECK(annotate_document(plain("Run PCR now."), tax).size() == 1);
    CHECK(annotate_document(plain("Run pcr now."), tax).empty());
  }
  SUBCASE("token boundaries only") {
    const auto tax = make_taxonomy({{"c1", {"tree"}}});
    CHECK(annotate_document(plain("A street and a subtree."), tax).empty());
  }
}

TEST_CASE("sample corpus annotates through the bundled taxonomy") {
  const auto tax = load_taxonomy(testing::data_path("sample_taxonomy.tsv"));
  const Annotator annotator(tax);
  const auto doc = parse_document(testing::read_file(testing::data_path("fixture_corpus/math_least_squares_chapter.xml")),
                                  InputFormat::xml);
  const auto got = annotator.annotate(doc);
  CHECK_FALSE(got.empty());
  CHECK(got == testing::brute_force_annotate(doc, tax));
}

TEST_CASE("property: annotator equals the brute-force oracle on random documents") {
  std::mt19937_64 rng(2024);
  std::size_t total = 0;
  std::size_t via = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const testing::RandomWorld world(rng, 30);
    const Annotator annotator(world.taxonomy);
    const auto doc = world.document(rng, "r" + std::to_string(trial), 200);
    const auto got = annotator.annotate(doc);
    const auto expected = testing::brute_force_annotate(doc, world.taxonomy);
    REQUIRE(got == expected);

    // No two annotations overlap; offsets point at the surface.
    for (std::size_t i = 0; i < got.size(); ++i) {
      const auto& s = doc.snippets[got[i].snippet_index];
      CHECK(s.text.substr(got[i].span.begin, got[i].span.size()) == got[i].surface);
      if (i > 0 && got[i - 1].snippet_index == got[i].snippet_index) CHECK(got[i - 1].span.end <= got[i].span.begin);
      via += got[i].via_abbreviation ? 1 : 0;
    }
    total += got.size();
  }
  MESSAGE("annotations " << total << ", via abbreviation " << via);
  CHECK(total > 500);
  CHECK(via > 0);
}

TEST_CASE("annotate is deterministic and thread-safe per document") {
  std::mt19937_64 rng(5);
  const testing::RandomWorld world(rng, 20);
  const Annotator annotator(world.taxonomy);
  const auto doc = world.document(rng, "d", 200);
  const auto first = annotator.annotate(doc);
  CHECK(annotator.annotate(doc) == first);
}
