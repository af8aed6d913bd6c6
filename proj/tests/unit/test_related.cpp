#include <doctest.h>

#include <algorithm>
#include <random>

#include "topicpages/related.hpp"

using namespace topicpages;

namespace {

SnippetConcepts snippets_of(const std::vector<std::set<std::string>>& sets) {
  SnippetConcepts out;
  for (std::size_t i = 0; i < sets.size(); ++i) out[{"d", i}] = sets[i];
  return out;
}

std::vector<std::pair<std::string, std::size_t>> counts(const CooccurrenceTable& t) {
  return {t.counts.begin(), t.counts.end()};
}

}  // namespace

TEST_CASE("cooccurrence examples") {
  CHECK(counts(cooccurrence_counts("A", snippets_of({{"A", "B"}}))) ==
        std::vector<std::pair<std::string, std::size_t>>{{"B", 1}});
  CHECK(counts(cooccurrence_counts("A", snippets_of({{"A", "B"}, {"A", "B", "C"}, {"B", "C"}}))) ==
        std::vector<std::pair<std::string, std::size_t>>{{"B", 2}, {"C", 1}});
  CHECK(cooccurrence_counts("A", snippets_of({{"A"}, {"A"}, {"B"}})).counts.empty());
}

TEST_CASE("group_by_snippet counts presence once per snippet") {
  std::vector<Annotation> a(4);
  a[0].concept_id = "A";
  a[1].concept_id = "A";
  a[2].concept_id = "B";
  a[3].concept_id = "B";
  a[3].doc_id = "other";
  const auto g = group_by_snippet(a);
  REQUIRE(g.size() == 2);
  CHECK(g.at(SnippetRef{"", 0}) == std::set<std::string>{"A", "B"});
  CHECK(cooccurrence_counts("A", g).counts.at("B") == 1);
}

TEST_CASE("top_related examples") {
  CooccurrenceTable t{"A", {{"B", 2}, {"C", 1}}};
  CHECK(top_related(t) == std::vector<RelatedConcept>{{"B", 2}, {"C", 1}});
  CooccurrenceTable tie{"A", {{"C", 3}, {"B", 3}, {"D", 1}}};
  CHECK(top_related(tie) == std::vector<RelatedConcept>{{"B", 3}, {"C", 3}, {"D", 1}});
  CHECK(top_related(tie, 1) == std::vector<RelatedConcept>{{"B", 3}});
}

TEST_CASE("property: counts match brute force, are symmetric, and top_related is a sorted prefix") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::string> ids;
    for (int i = 0; i < 100; ++i) ids.push_back("k" + std::to_string(1000 + rng() % 9000) + "_" + std::to_string(i));
    std::vector<std::set<std::string>> sets(150);
    for (auto& s : sets) {
      const auto n = rng() % 8;
      for (std::size_t i = 0; i < n; ++i) s.insert(ids[rng() % 20 + (rng() % 4 == 0 ? rng() % 80 : 0)]);
    }
    const auto snippets = snippets_of(sets);
    for (int probe = 0; probe < 10; ++probe) {
      const auto& a = ids[rng() % 25];
      const auto& b = ids[rng() % 25];
      if (a == b) continue;
      std::size_t both = 0;
      for (const auto& s : sets) both += s.count(a) && s.count(b) ? 1 : 0;
      const auto ta = cooccurrence_counts(a, snippets);
      const auto tb = cooccurrence_counts(b, snippets);
      const auto get = [](const CooccurrenceTable& t, const std::string& id) {
        const auto it = t.counts.find(id);
        return it == t.counts.end() ? std::size_t{0} : it->second;
      };
      CHECK(get(ta, b) == both);
      CHECK(get(tb, a) == both);
      CHECK(ta.counts.count(a) == 0);
      for (const auto& [id, c] : ta.counts) CHECK(c >= 1);

      std::vector<RelatedConcept> full;
      for (const auto& [id, c] : ta.counts) full.push_back({id, c});
      std::sort(full.begin(), full.end(), [](const auto& x, const auto& y) {
        return x.count != y.count ? x.count > y.count : x.concept_id < y.concept_id;
      });
      full.resize(std::min<std::size_t>(full.size(), 5));
      const auto top = top_related(ta);
      CHECK(top == full);
      CHECK(top.size() <= 5);
      CHECK(std::none_of(top.begin(), top.end(), [&](const auto& r) { return r.concept_id == a; }));
    }
  }
}
