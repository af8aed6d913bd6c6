#include <doctest.h>

#include <nlohmann/json.hpp>

#include "test_support.hpp"

using testing::quote;

namespace {

std::string cli() { return testing::quote(testing::cli_path()); }

int rc(const std::string& args) { return testing::run(cli() + " " + args).exit_code; }

struct Workspace {
  testing::TempDir dir;
  std::string taxonomy = quote(testing::data_path("sample_taxonomy.tsv"));

  std::string path(const std::string& name) const { return quote(dir / name); }

  void prepare() {
    REQUIRE(rc("ingest " + quote(testing::data_path("fixture_corpus")) + " --format xml --out " + path("corpus.jsonl")) == 0);
    REQUIRE(rc("annotate --taxonomy " + taxonomy + " --corpus " + path("corpus.jsonl") + " --out " +
               path("annotations.jsonl")) == 0);
    REQUIRE(rc("train-baseline " + quote(testing::data_path("synthetic_labeled.jsonl")) + " --out " +
               path("model.json")) == 0);
  }

  std::string build_args(const std::string& out) const {
    return "build-pages --corpus " + path("corpus.jsonl") + " --taxonomy " + taxonomy + " --annotations " +
           path("annotations.jsonl") + " --model " + path("model.json") + " --out " + path(out);
  }

  std::string mock_endpoint(const std::string& name, const std::string& script) const {
    testing::write_file(dir / name, script);
    return "'" + testing::cli_path() + " mock-scorer --script " + (dir / name).string() + "'";
  }
};

}  // namespace

TEST_CASE("usage errors exit 1") {
  CHECK(rc("") == 1);
  CHECK(rc("frobnicate") == 1);
  CHECK(rc("--help") == 0);
  CHECK(rc("ingest") == 1);
  CHECK(rc("ingest . --format html") == 1);
  CHECK(rc("ingest /nonexistent/dir") == 1);
  CHECK(rc("evaluate --folds 1") == 1);
  Workspace w;
  w.prepare();
  CHECK(rc("build-pages --taxonomy " + w.taxonomy + " --corpus " + w.path("corpus.jsonl")) == 1);
  CHECK(rc(w.build_args("p.jsonl") + " --scorer bridge") == 1);
}

TEST_CASE("data and format errors exit 2") {
  testing::TempDir dir;
  std::filesystem::create_directories(dir / "bad");
  testing::write_file(dir / "bad" / "x.xml", "<article id=\"x\"><body><p>text</sec></body></article>");
  CHECK(rc("ingest " + quote(dir / "bad") + " --out " + quote(dir / "c.jsonl")) == 2);
  std::filesystem::create_directories(dir / "empty");
  CHECK(rc("ingest " + quote(dir / "empty") + " --out " + quote(dir / "c.jsonl")) == 2);
  CHECK(rc("annotate --taxonomy /nonexistent.tsv --corpus " + quote(dir / "c.jsonl")) == 2);
  testing::write_file(dir / "labeled.jsonl", "{\"concept\": \"x\"}\n");
  CHECK(rc("train-baseline " + quote(dir / "labeled.jsonl") + " --out " + quote(dir / "m.json")) == 2);
  testing::write_file(dir / "pages.jsonl", "not json\n");
  CHECK(rc("render-html " + quote(dir / "pages.jsonl") + " --out " + quote(dir / "site")) == 2);
  CHECK(rc("evaluate --dataset wcl --path " + quote(dir / "no-wcl-here")) == 2);
}

TEST_CASE("bridge connection failures exit 3") {
  Workspace w;
  w.prepare();
  CHECK(rc(w.build_args("p.jsonl") + " --scorer bridge --endpoint 127.0.0.1:1 --handshake-timeout-ms 500") == 3);
  CHECK(rc(w.build_args("p.jsonl") + " --scorer bridge --handshake-timeout-ms 300 --endpoint " +
           w.mock_endpoint("silent.json", R"({"fault": "no_handshake"})")) == 3);
}

TEST_CASE("pipeline through the CLI reproduces the golden pages and HTML") {
  Workspace w;
  w.prepare();
  REQUIRE(rc(w.build_args("pages.jsonl") + " --timestamp 1700000000") == 0);
  const auto golden = testing::read_file(testing::golden_path("pages.jsonl"));
  CHECK(testing::read_file(w.dir / "pages.jsonl") == golden);

  REQUIRE(rc("render-html " + w.path("pages.jsonl") + " --out " + w.path("site")) == 0);
  CHECK(testing::read_file(w.dir / "site" / "c01__mathematics.html") ==
        testing::read_file(testing::golden_path("c01__mathematics.html")));
  CHECK(std::filesystem::exists(w.dir / "site" / "index.html"));

  SUBCASE("second run is byte-identical") {
    REQUIRE(rc(w.build_args("again.jsonl") + " --timestamp 1700000000") == 0);
    CHECK(testing::read_file(w.dir / "again.jsonl") == golden);
  }
  SUBCASE("SOURCE_DATE_EPOCH pins the timestamp") {
    REQUIRE(testing::run("SOURCE_DATE_EPOCH=1700000000 " + cli() + " " + w.build_args("env.jsonl")).exit_code == 0);
    CHECK(testing::read_file(w.dir / "env.jsonl") == golden);
  }
  SUBCASE("annotating on the fly and training inline give the same pages") {
    REQUIRE(rc("build-pages --corpus " + w.path("corpus.jsonl") + " --taxonomy " + w.taxonomy + " --train " +
               quote(testing::data_path("synthetic_labeled.jsonl")) + " --timestamp 1700000000 --out " +
               w.path("inline.jsonl")) == 0);
    CHECK(testing::read_file(w.dir / "inline.jsonl") == golden);
  }
  SUBCASE("config file, then flags") {
    testing::write_file(w.dir / "pages.conf", "snippets_k=1\nrelated_k=1\ndomains=Mathematics\n");
    REQUIRE(rc(w.build_args("small.jsonl") + " --config " + w.path("pages.conf") + " --related-k 2") == 0);
    std::istringstream in(testing::read_file(w.dir / "small.jsonl"));
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
      const auto j = nlohmann::json::parse(line);
      CHECK(j["domain"] == "Mathematics");
      CHECK(j["snippets"].size() <= 1);
      CHECK(j["related"].size() <= 2);
      ++n;
    }
    CHECK(n == 6);
  }
}

TEST_CASE("bridge scorer through the CLI") {
  Workspace w;
  w.prepare();
  SUBCASE("scores come from the mock") {
    REQUIRE(rc(w.build_args("bridge.jsonl") + " --timestamp 1700000000 --scorer bridge --endpoint " +
               w.mock_endpoint("m.json", R"({"default": 0.9, "shuffle": true})")) == 0);
    std::istringstream in(testing::read_file(w.dir / "bridge.jsonl"));
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
      const auto j = nlohmann::json::parse(line);
      REQUIRE_FALSE(j["definition"].is_null());
      CHECK(j["definition"]["score"] == 0.9);
      ++n;
    }
    CHECK(n == 13);
  }
  SUBCASE("a misbehaving bridge falls back to the baseline") {
    REQUIRE(rc(w.build_args("fallback.jsonl") + " --timestamp 1700000000 --scorer bridge --endpoint " +
               w.mock_endpoint("f.json", R"({"fault": "out_of_range", "fault_after": 1})")) == 0);
    CHECK(testing::read_file(w.dir / "fallback.jsonl") == testing::read_file(testing::golden_path("pages.jsonl")));
  }
}

TEST_CASE("evaluate prints macro metrics") {
  const auto r = testing::run(cli() + " evaluate --dataset jsonl --path " +
                              quote(testing::data_path("synthetic_labeled.jsonl")) + " --folds 5");
  REQUIRE(r.exit_code == 0);
  const auto j = nlohmann::json::parse(r.output);
  CHECK(j["macro_f1"].get<double>() > 0.8);
  CHECK(j["confusion"]["tp"].get<int>() + j["confusion"]["fn"].get<int>() == 25);
}
