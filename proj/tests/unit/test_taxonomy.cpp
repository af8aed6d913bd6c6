#include <doctest.h>

#include <random>
#include <sstream>

#include "test_support.hpp"
#include "topicpages/error.hpp"
#include "topicpages/taxonomy.hpp"

using namespace topicpages;

TEST_CASE("normalize") {
  CHECK(normalize("  Regression   Analysis ") == "regression analysis");
  CHECK(normalize("Stra\xC3\x9F" "e") == "strasse");  // fold of sharp s
  CHECK(normalize("Cafe\xCC\x81") == normalize("Caf\xC3\xA9"));  // NFC
  CHECK(normalize("") == "");
  CHECK(normalize("a\tb\nc") == "a b c");
}

TEST_CASE("property: normalize is idempotent") {
  std::mt19937_64 rng(11);
  const std::vector<std::string> pieces{"A", "b", " ", "  ", "\t", "\xC3\x89", "e\xCC\x81", "\xC3\x9F", "\xCE\xA3",
                                        "-", "ML", "\xEF\xAC\x81", "1", "\xE2\x80\x94"};
  for (int i = 0; i < 2000; ++i) {
    std::string s;
    const auto n = rng() % 12;
    for (std::size_t k = 0; k < n; ++k) s += pieces[rng() % pieces.size()];
    const auto once = normalize(s);
    CHECK(normalize(once) == once);
  }
}

TEST_CASE("case sensitivity rule") {
  CHECK(is_case_sensitive_alias("ML"));
  CHECK(is_case_sensitive_alias("PCR"));
  CHECK(is_case_sensitive_alias("TNF"));
  CHECK_FALSE(is_case_sensitive_alias("ANOVA"));  // five characters
  CHECK_FALSE(is_case_sensitive_alias("kNN"));
  CHECK_FALSE(is_case_sensitive_alias("42"));
}

TEST_CASE("sample taxonomy has 40 concepts and 47 distinct normalized aliases") {
  const auto tax = load_taxonomy(testing::data_path("sample_taxonomy.tsv"));
  CHECK(tax.size() == 40);
  CHECK(tax.surface_index().size() == 47);
  // "average" is shared, so the key lists both concepts.
  CHECK(tax.lookup("average") == std::vector<std::string>{"c32", "c33"});
  // Case duplicates collapse onto one alias of the concept.
  const auto* cv = tax.find("c19");
  REQUIRE(cv != nullptr);
  CHECK(cv->aliases.size() == 1);
  CHECK(tax.find("c01")->domains == std::vector<std::string>{"Mathematics", "Computer Science"});
}

TEST_CASE("match_surface honors case-sensitive aliases") {
  const auto tax = load_taxonomy(testing::data_path("sample_taxonomy.tsv"));
  const auto ml = *tax.index_of("c13");
  CHECK(tax.match_surface("ML") == std::vector<std::size_t>{ml});
  CHECK(tax.match_surface("ml").empty());
  CHECK(tax.match_surface("Machine  Learning") == std::vector<std::size_t>{ml});
  CHECK(tax.match_surface("nothing here").empty());
}

TEST_CASE("parse_taxonomy errors carry line numbers") {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return parse_taxonomy(in);
  };
  const std::string header = "concept_id\tpreferred_label\taliases\tdomains\n";
  CHECK_THROWS_WITH_AS(parse("id\tlabel\n"), doctest::Contains("line 1"), FormatError);
  CHECK_THROWS_WITH_AS(parse(header + "c1\tx\t\tD\nc2\ty\n"), doctest::Contains("line 3"), FormatError);
  CHECK_THROWS_WITH_AS(parse(header + "c1\tx\t\tD\nc1\ty\t\tD\n"), doctest::Contains("line 3"), FormatError);
  CHECK_THROWS_AS(parse(header + "c1\t\t\tD\n"), FormatError);
  CHECK_NOTHROW(parse(header + "c1\tx\ta|b\tD|E\n"));
  CHECK_THROWS_AS(load_taxonomy("/nonexistent/taxonomy.tsv"), DataError);
}

TEST_CASE("minimal taxonomy files") {
  std::istringstream one("concept_id\tpreferred_label\taliases\tdomains\nc1\tregression analysis\t\tMathematics\n");
  const auto t1 = parse_taxonomy(one);
  CHECK(t1.size() == 1);
  CHECK(t1.surface_index().size() == 1);
  CHECK(t1.concepts()[0].aliases == std::vector<std::string>{"regression analysis"});

  std::istringstream two("concept_id\tpreferred_label\taliases\tdomains\nc1\tML\tML|machine learning\tCS\n");
  const auto t2 = parse_taxonomy(two);
  CHECK(t2.surface_index().size() == 2);
  CHECK(t2.lookup("ml") == std::vector<std::string>{"c1"});
  CHECK(t2.lookup("machine learning") == std::vector<std::string>{"c1"});
  // Micro sign folds to Greek small mu, which is then a fixed point.
  CHECK(normalize("\xC2\xB5-law") == "\xCE\xBC-law");
  CHECK(normalize("\xCE\xBC-law") == "\xCE\xBC-law");
  CHECK(normalize("ML") == "ml");
}
